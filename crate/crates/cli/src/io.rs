use std::fs;
use std::path::{Path, PathBuf};

use armforge::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub const CONFIG_DIR_VAR: &str = "ARMFORGE_CONFIG_DIR";

/// Resolves a config path: as given if it exists, otherwise relative paths
/// are looked up in each directory of `ARMFORGE_CONFIG_DIR`.
pub fn resolve(path: &Path) -> Result<PathBuf> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if path.is_relative() {
        if let Some(dirs) = std::env::var_os(CONFIG_DIR_VAR) {
            for dir in std::env::split_paths(&dirs) {
                let candidate = dir.join(path);
                if candidate.exists() {
                    return Ok(candidate);
                }
            }
        }
    }
    Err(Error::Configuration(format!("config file '{}' not found", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let resolved = resolve(path)?;
    let text = fs::read_to_string(&resolved)
        .map_err(|e| Error::Configuration(format!("cannot read '{}': {e}", resolved.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Configuration(format!("'{}': {e}", resolved.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Configuration(format!("cannot encode output: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary sibling and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Configuration(format!("cannot write '{}': {e}", path.display()));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Configuration(format!("non-UTF-8 CSV output: {e}")))
}

/// Parses `a,b,c` into floats.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Configuration(format!("'{s}' is not a number in '{text}'")))
        })
        .collect()
}

pub fn parse_point(text: &str) -> Result<[f64; 3]> {
    let v = parse_list(text)?;
    <[f64; 3]>::try_from(v)
        .map_err(|v| Error::Configuration(format!("expected x,y,z, got {} values", v.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_points() {
        assert_eq!(parse_list("1, -2.5,3e-1").unwrap(), vec![1.0, -2.5, 0.3]);
        assert!(parse_list("1,,2").is_err());
        assert_eq!(parse_point("0,0.3,-0.04").unwrap(), [0.0, 0.3, -0.04]);
        assert!(parse_point("1,2").is_err());
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"{}").unwrap();
        write_atomic(&path, b"[]").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"[]");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn missing_config_is_a_configuration_error() {
        let err = read_json::<serde_json::Value>(Path::new("definitely-not-here.json")).unwrap_err();
        assert_eq!(err.kind(), "Configuration");
    }
}
