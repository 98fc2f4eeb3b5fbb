use crate::exact_linalg::Caps;
use crate::text::ParseError;
use std::collections::BTreeMap;

/// `key = value` lines; `#` starts a comment line. Each value remembers its
/// line so later validation errors can point at it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, (usize, String)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ParseError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ParseError::new(ln, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ParseError::new(ln, format!("invalid key `{k}`")));
            }
            if v.is_empty() {
                return Err(ParseError::new(ln, format!("empty value for `{k}`")));
            }
            if entries.insert(k.to_string(), (ln, v.to_string())).is_some() {
                return Err(ParseError::new(ln, format!("duplicate key `{k}`")));
            }
        }
        Ok(Config { entries })
    }

    /// Sets a value from the command line (line 0).
    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), (0, value));
    }

    pub fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ParseError> {
        for (k, (ln, _)) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(ParseError::new(*ln, format!("unknown key `{k}` (expected one of: {})", allowed.join(", "))));
            }
        }
        Ok(())
    }

    pub fn require(&self, key: &str) -> Result<(usize, &str), ParseError> {
        self.raw(key).ok_or_else(|| ParseError::new(0, format!("missing required key `{key}`")))
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ParseError> {
        match self.raw(key) {
            None => Ok(None),
            Some((ln, v)) => v.parse().map(Some).map_err(|_| ParseError::new(ln, format!("invalid value `{v}` for `{key}`"))),
        }
    }

    pub fn get_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ParseError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// An integer list: comma-separated items, each `x`, `a..b` (inclusive),
    /// `a..b+k` (step `k`) or `a..b*k` (geometric).
    pub fn range(&self, key: &str) -> Result<Vec<u64>, ParseError> {
        let (ln, v) = self.require(key)?;
        let out = parse_range(v).map_err(|m| ParseError::new(ln, format!("`{key}`: {m}")))?;
        if out.is_empty() {
            return Err(ParseError::new(ln, format!("`{key}` is an empty range")));
        }
        Ok(out)
    }

    /// `caps_bits`, `caps_minors`, `caps_iterations`, defaulting to [`Caps::default`].
    pub fn caps(&self) -> Result<Caps, ParseError> {
        let d = Caps::default();
        Ok(Caps {
            max_bits: self.get_or("caps_bits", d.max_bits)?,
            max_minors: self.get_or("caps_minors", d.max_minors)?,
            max_iterations: self.get_or("caps_iterations", d.max_iterations)?,
        })
    }
}

pub fn parse_range(v: &str) -> Result<Vec<u64>, String> {
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| format!("invalid integer `{}`", s.trim()));
    let mut out = Vec::new();
    for item in v.split(',') {
        let item = item.trim();
        let Some((a, rest)) = item.split_once("..") else {
            out.push(num(item)?);
            continue;
        };
        let a = num(a)?;
        let (b, step) = if let Some((b, k)) = rest.split_once('*') {
            (num(b)?, Step::Mul(num(k)?))
        } else if let Some((b, k)) = rest.split_once('+') {
            (num(b)?, Step::Add(num(k)?))
        } else {
            (num(rest)?, Step::Add(1))
        };
        let mut x = a;
        match step {
            Step::Add(0) | Step::Mul(0) | Step::Mul(1) => return Err(format!("degenerate step in `{item}`")),
            Step::Mul(_) if a == 0 => return Err(format!("geometric range from 0 in `{item}`")),
            _ => {}
        }
        while x <= b {
            out.push(x);
            x = match step {
                Step::Add(k) => x + k,
                Step::Mul(k) => x * k,
            };
        }
    }
    Ok(out)
}

enum Step {
    Add(u64),
    Mul(u64),
}

/// `bits=…,minors=…,iterations=…`, any subset.
pub fn parse_caps_flag(s: &str, base: Caps) -> Result<Caps, String> {
    let mut c = base;
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value in `{part}`"))?;
        let bad = || format!("invalid value in `{part}`");
        match k.trim() {
            "bits" => c.max_bits = v.trim().parse().map_err(|_| bad())?,
            "minors" => c.max_minors = v.trim().parse().map_err(|_| bad())?,
            "iterations" => c.max_iterations = v.trim().parse().map_err(|_| bad())?,
            other => return Err(format!("unknown cap `{other}` (bits, minors, iterations)")),
        }
    }
    Ok(c)
}
