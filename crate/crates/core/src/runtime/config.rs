//! Run configuration: pool size and the scripted external memory map.
//!
//! ```text
//! # comment
//! pool 8
//! mmio 80000100h 5 7
//! mmio-strict
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

pub const DEFAULT_POOL: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub pool: u32,
    /// Values returned by successive reads of each address.
    pub mmio: BTreeMap<u32, Vec<i64>>,
    /// Unscripted addresses trap instead of reading as 0.
    pub strict_mmio: bool,
    /// Disables the dynamic checks, as compiled code built with NDEBUG.
    pub ndebug: bool,
    /// Verifies pool and port ownership after every step.
    pub audit: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            pool: DEFAULT_POOL,
            mmio: BTreeMap::new(),
            strict_mmio: false,
            ndebug: false,
            audit: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("pool capacity must be at least 1")]
    EmptyPool,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            let mut words = content.split_whitespace();
            let Some(key) = words.next() else { continue };
            let err = |message: String| ConfigError::Syntax { line, message };
            match key {
                "pool" => {
                    let n = words.next().ok_or_else(|| err("pool needs a block count".into()))?;
                    cfg.pool = parse_number(n)
                        .and_then(|v| u32::try_from(v).ok())
                        .ok_or_else(|| err(format!("bad pool size `{n}`")))?;
                }
                "mmio" => {
                    let a = words.next().ok_or_else(|| err("mmio needs an address".into()))?;
                    let addr = parse_hex(a)
                        .and_then(|v| u32::try_from(v).ok())
                        .ok_or_else(|| err(format!("bad address `{a}`")))?;
                    let values = words
                        .map(|w| parse_number(w).ok_or_else(|| err(format!("bad value `{w}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    cfg.mmio.entry(addr).or_default().extend(values);
                    continue;
                }
                "mmio-strict" => cfg.strict_mmio = true,
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
            if let Some(extra) = words.next() {
                return Err(err(format!("unexpected `{extra}`")));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pool == 0 {
            return Err(ConfigError::EmptyPool);
        }
        Ok(())
    }
}

/// Addresses are hexadecimal, with optional `0x` prefix or `h` suffix.
fn parse_hex(s: &str) -> Option<i64> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_suffix('h'))
        .unwrap_or(s);
    i64::from_str_radix(digits, 16).ok()
}

/// Values are decimal (optionally negative) or hexadecimal with `0x`/`h`.
fn parse_number(s: &str) -> Option<i64> {
    if s.starts_with("0x") || (s.ends_with('h') && s.len() > 1) {
        parse_hex(s)
    } else {
        s.parse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_directives() {
        let cfg = Config::parse("# demo\npool 4\nmmio 80000100h 5 7\nmmio 0x10 0FFh -1\nmmio-strict\n").unwrap();
        assert_eq!(cfg.pool, 4);
        assert_eq!(cfg.mmio[&0x8000_0100], vec![5, 7]);
        assert_eq!(cfg.mmio[&0x10], vec![255, -1]);
        assert!(cfg.strict_mmio);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Config::parse("pool 0"), Err(ConfigError::EmptyPool));
        assert!(matches!(Config::parse("pool"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(Config::parse("\nfrobnicate"), Err(ConfigError::Syntax { line: 2, .. })));
        assert!(matches!(Config::parse("mmio zz 1"), Err(ConfigError::Syntax { .. })));
    }
}
