use super::{FarberError, PermutationAction};
use crate::text::{parse_ints, Lines, ParseError};
use std::collections::BTreeMap;
use std::fmt;

impl PermutationAction {
    /// `degree n`, then one `gen <name>: <images of 0..n>` line per generator.
    pub fn parse(text: &str) -> Result<PermutationAction, FarberError> {
        let mut lines = Lines::new(text);
        let (ln, head) = lines.expect_line("`degree n`")?;
        let degree: usize = head
            .strip_prefix("degree")
            .map(str::trim)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| ParseError::new(ln, "expected `degree n`"))?;
        let mut gens = BTreeMap::new();
        while let Some((ln, l)) = lines.next_line() {
            let rest = l.strip_prefix("gen ").ok_or_else(|| ParseError::new(ln, "expected `gen <name>: <images>`"))?;
            let (name, imgs) = rest.split_once(':').ok_or_else(|| ParseError::new(ln, "missing `:` after generator name"))?;
            let name = name.trim();
            let imgs: Vec<u32> = parse_ints(ln, imgs)?;
            if imgs.len() != degree {
                return Err(ParseError::new(ln, format!("`{name}` has {} images, expected {degree}", imgs.len())).into());
            }
            if gens.insert(name.to_string(), imgs).is_some() {
                return Err(ParseError::new(ln, format!("duplicate generator `{name}`")).into());
            }
        }
        PermutationAction::new(degree, gens)
    }
}

impl fmt::Display for PermutationAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "degree {}", self.degree)?;
        for (name, img) in &self.generators {
            let s: Vec<String> = img.iter().map(|x| x.to_string()).collect();
            writeln!(f, "gen {name}: {}", s.join(" "))?;
        }
        Ok(())
    }
}
