//! Config files: one `[section]` per subcommand holding `key = value` lines.
//! Blank lines and lines starting with `#` are ignored. Keys are the flag
//! names with `_` for `-` (`m_limit` is `--m-limit`); entries are injected in
//! front of the command-line flags, so flags given explicitly win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Command;

use crate::error::CliError;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    sections: BTreeMap<String, Vec<(String, String)>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ConfigFile::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_string();
                if cfg.sections.contains_key(&name) {
                    return Err(CliError::Config(format!(
                        "line {line_no}: duplicate section [{name}]"
                    )));
                }
                cfg.sections.insert(name.clone(), Vec::new());
                current = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {line_no}: expected `key = value`, got `{line}`"
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(section) = current.as_ref() else {
                return Err(CliError::Config(format!(
                    "line {line_no}: `{key}` appears before any [section]"
                )));
            };
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(CliError::Config(format!(
                    "line {line_no}: invalid key `{key}`"
                )));
            }
            let entries = cfg.sections.get_mut(section).expect("section exists");
            if entries.iter().any(|(k, _)| k == key) {
                return Err(CliError::Config(format!(
                    "line {line_no}: duplicate key `{key}` in [{section}]"
                )));
            }
            entries.push((key.to_string(), value.to_string()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn section(&self, name: &str) -> &[(String, String)] {
        self.sections.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Reject unknown sections and keys anywhere in the file.
    pub fn validate(&self, root: &Command) -> Result<(), CliError> {
        for (name, entries) in &self.sections {
            let Some(sub) = root.find_subcommand(name) else {
                return Err(CliError::Config(format!("unknown section [{name}]")));
            };
            let keys = config_keys(sub);
            for (k, _) in entries {
                if !keys.iter().any(|known| known == k) {
                    return Err(CliError::Config(format!(
                        "unknown key `{k}` in [{name}]; known keys: {}",
                        keys.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Keys accepted in the section of `sub`: every flag except `config`.
pub fn config_keys(sub: &Command) -> Vec<String> {
    sub.get_arguments()
        .filter(|a| a.get_long().is_some())
        .map(|a| a.get_id().as_str().to_string())
        .filter(|id| id != "config" && id != "help" && id != "version")
        .collect()
}

/// Position of the subcommand and the value of `--config`, found without a
/// full parse (required flags may still be missing at this point).
fn locate(argv: &[OsString], root: &Command) -> (Option<usize>, Option<PathBuf>) {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy();
        if arg == "--config" {
            config = argv.get(i + 1).map(PathBuf::from);
            i += 2;
            continue;
        }
        if let Some(v) = arg.strip_prefix("--config=") {
            config = Some(PathBuf::from(v));
        } else if sub.is_none()
            && !arg.starts_with('-')
            && root.find_subcommand(arg.as_ref()).is_some()
        {
            sub = Some(i);
        }
        i += 1;
    }
    (sub, config)
}

/// `argv` with the config entries of the selected subcommand inserted right
/// after the subcommand name.
pub fn expand_argv(argv: Vec<OsString>, root: &Command) -> Result<Vec<OsString>, CliError> {
    let (sub_idx, config) = locate(&argv, root);
    let (Some(sub_idx), Some(config)) = (sub_idx, config) else {
        return Ok(argv);
    };
    let cfg = ConfigFile::load(&config)?;
    cfg.validate(root)?;
    let name = argv[sub_idx].to_string_lossy().to_string();
    let mut out: Vec<OsString> = argv[..=sub_idx].to_vec();
    for (k, v) in cfg.section(&name) {
        out.push(format!("--{}", k.replace('_', "-")).into());
        out.push(v.into());
    }
    out.extend_from_slice(&argv[sub_idx + 1..]);
    Ok(out)
}
