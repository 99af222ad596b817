//! Merges flag values with an optional JSON configuration document.

use std::path::Path;
use std::str::FromStr;

use sensikit::config::{parse_config, ConfigDoc};
use sensikit::Error;

pub fn load(path: Option<&Path>) -> Result<ConfigDoc, Error> {
    match path {
        None => Ok(ConfigDoc::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            parse_config(&text)
        }
    }
}

/// Looks up settings, preferring the flag and falling back to the document.
pub struct Settings<'a> {
    doc: &'a ConfigDoc,
}

impl<'a> Settings<'a> {
    pub fn new(doc: &'a ConfigDoc) -> Self {
        Settings { doc }
    }

    pub fn text(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone()
            .or_else(|| self.doc.get(key).map(str::to_string))
    }

    pub fn parsed<T: FromStr>(&self, flag: &Option<String>, key: &str) -> Result<Option<T>, Error> {
        self.text(flag, key)
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("--{key}: cannot parse '{s}'")))
            })
            .transpose()
    }

    pub fn parsed_or<T: FromStr>(&self, flag: &Option<String>, key: &str, default: T) -> Result<T, Error> {
        Ok(self.parsed(flag, key)?.unwrap_or(default))
    }

    /// Boolean switch: set by the flag or by `true` in the document.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, Error> {
        if flag {
            return Ok(true);
        }
        match self.doc.get(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(other) => Err(Error::Parse(format!("config: '{key}' must be true or false, got '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_document() {
        let doc = parse_config(r#"{"seed":5,"budget":700,"svg":true}"#).unwrap();
        let s = Settings::new(&doc);
        assert_eq!(s.parsed_or::<u64>(&Some("9".into()), "seed", 0).unwrap(), 9);
        assert_eq!(s.parsed_or::<u64>(&None, "seed", 0).unwrap(), 5);
        assert_eq!(s.parsed_or::<usize>(&None, "reps", 3).unwrap(), 3);
        assert!(s.switch(false, "svg").unwrap());
        assert!(s.parsed::<u64>(&Some("x".into()), "seed").is_err());
    }
}
