//! Parsing of `name:key=value,key=value` spec strings.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A spec string split into its head and key/value parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecString {
    pub head: String,
    pub params: BTreeMap<String, String>,
}

impl SpecString {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r)),
            None => (s, None),
        };
        if head.is_empty() {
            return Err(Error::Parse(format!("empty spec string '{s}'")));
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let (k, v) = item.split_once('=').ok_or_else(|| {
                    Error::Parse(format!("expected key=value in '{s}', got '{item}'"))
                })?;
                if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                    return Err(Error::Parse(format!("duplicate key '{}' in '{s}'", k.trim())));
                }
            }
        }
        Ok(Self {
            head: head.to_string(),
            params,
        })
    }

    /// Parse a required parameter.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .params
            .get(key)
            .ok_or_else(|| Error::Parse(format!("'{}' needs parameter '{key}'", self.head)))?;
        raw.parse()
            .map_err(|_| Error::Parse(format!("bad value '{raw}' for '{key}' in '{}'", self.head)))
    }

    /// Parse an optional parameter, falling back to `default`.
    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.params.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    /// Reject parameters outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Parse(format!(
                "unknown parameter '{k}' for '{}' (expected one of: {})",
                self.head,
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_head_and_params() {
        let s = SpecString::parse("haar:jmax=4,tau=0.5").unwrap();
        assert_eq!(s.head, "haar");
        assert_eq!(s.get::<usize>("jmax").unwrap(), 4);
        assert_eq!(s.get::<f64>("tau").unwrap(), 0.5);
        assert!(s.only(&["jmax", "tau"]).is_ok());
        assert!(s.only(&["jmax"]).is_err());
    }

    #[test]
    fn bare_head() {
        let s = SpecString::parse("tv").unwrap();
        assert_eq!(s.head, "tv");
        assert!(s.params.is_empty());
    }

    #[test]
    fn malformed() {
        assert!(SpecString::parse("").is_err());
        assert!(SpecString::parse("fused:eps").is_err());
        assert!(SpecString::parse("fused:eps=1,eps=2").is_err());
        assert!(SpecString::parse("fused:eps=x").unwrap().get::<f64>("eps").is_err());
    }
}
