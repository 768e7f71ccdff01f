//! `--config` TOML files, turned into flags placed ahead of the user's own.

use std::fs;

use clap::Command;

/// Index of the subcommand name and the config path, if any.
fn scan(raw: &[String]) -> Result<(Option<usize>, Option<String>), String> {
    let (mut sub, mut path) = (None, None);
    let mut i = 1;
    while i < raw.len() {
        let a = &raw[i];
        if a == "--config" {
            path = Some(raw.get(i + 1).ok_or("--config needs a path")?.clone());
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    Ok((sub, path))
}

fn flag_value(key: &str, value: &toml::Value) -> Result<Vec<String>, String> {
    let flag = format!("--{}", key.replace('_', "-"));
    let text = match value {
        toml::Value::Boolean(true) => return Ok(vec![flag]),
        toml::Value::Boolean(false) => return Ok(Vec::new()),
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(n) => n.to_string(),
        toml::Value::Float(x) => x.to_string(),
        _ => return Err(format!("config key `{key}` must be a string, number or boolean")),
    };
    Ok(vec![flag, text])
}

/// Returns `raw` with the config flags inserted right after the subcommand.
pub fn merge(raw: &[String], cli: &Command) -> Result<Vec<String>, String> {
    let (Some(at), Some(path)) = scan(raw)? else {
        return Ok(raw.to_vec());
    };
    let name = &raw[at];
    let Some(sub) = cli.find_subcommand(name) else {
        return Ok(raw.to_vec());
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("reading config {path}: {e}"))?;
    let table: toml::Table = text.parse().map_err(|e| format!("parsing config {path}: {e}"))?;
    let accepts = |key: &str| {
        let long = key.replace('_', "-");
        sub.get_arguments().any(|a| a.get_long() == Some(long.as_str()))
    };
    let mut flags = Vec::new();
    for (key, value) in &table {
        if !value.is_table() && accepts(key) {
            flags.extend(flag_value(key, value)?);
        }
    }
    if let Some(section) = table.get(name.as_str()) {
        let section = section.as_table().ok_or_else(|| format!("config key `{name}` must be a table"))?;
        for (key, value) in section {
            flags.extend(flag_value(key, value)?);
        }
    }
    let mut out = raw[..=at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&raw[at + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn scan_finds_subcommand_after_config() {
        let raw = strings(&["permwalk", "--config", "a.toml", "simulate", "--seed", "1"]);
        assert_eq!(scan(&raw).unwrap(), (Some(3), Some("a.toml".into())));
        let raw = strings(&["permwalk", "simulate", "--config=b.toml"]);
        assert_eq!(scan(&raw).unwrap(), (Some(1), Some("b.toml".into())));
    }

    #[test]
    fn values_become_flags() {
        assert_eq!(flag_value("random_schedules", &toml::Value::Integer(5)).unwrap(), strings(&["--random-schedules", "5"]));
        assert_eq!(flag_value("joint", &toml::Value::Boolean(true)).unwrap(), strings(&["--joint"]));
        assert!(flag_value("joint", &toml::Value::Boolean(false)).unwrap().is_empty());
        assert!(flag_value("x", &toml::Value::Array(Vec::new())).is_err());
    }
}
