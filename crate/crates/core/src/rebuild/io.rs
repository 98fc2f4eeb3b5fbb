use super::{RebuildError, Rebuilding};
use crate::chain::{ChainComplex, GradedMap};
use crate::exact_linalg::IntMatrix;
use crate::text::{Lines, ParseError};
use std::fmt;

fn expect_keyword(lines: &mut Lines<'_>, word: &str) -> Result<usize, ParseError> {
    let (ln, l) = lines.expect_line(word)?;
    if l != word {
        return Err(ParseError::new(ln, format!("expected `{word}`, found `{l}`")));
    }
    Ok(ln)
}

fn keyed_int(lines: &mut Lines<'_>, key: &str) -> Result<usize, ParseError> {
    let (ln, l) = lines.expect_line(key)?;
    let mut it = l.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(k), Some(v), None) if k == key => {
            v.parse().map_err(|_| ParseError::new(ln, format!("invalid integer `{v}` after `{key}`")))
        }
        _ => Err(ParseError::new(ln, format!("expected `{key} <int>`"))),
    }
}

fn read_map(lines: &mut Lines<'_>, name: &str, shift: usize, count: usize) -> Result<GradedMap, RebuildError> {
    let ln = lines.line() + 1;
    let (hl, l) = lines.expect_line("map header")?;
    let parts: Vec<&str> = l.split_whitespace().collect();
    if parts.len() != 2 || parts[0] != "map" || parts[1] != name {
        return Err(ParseError::new(hl.max(ln), format!("expected `map {name}`")).into());
    }
    let mut comps = Vec::with_capacity(count);
    for j in 0..count {
        let d = keyed_int(lines, "degree")?;
        if d != j {
            return Err(ParseError::new(lines.line(), format!("expected degree {j} of {name}, found {d}")).into());
        }
        comps.push(IntMatrix::read_triplets(lines)?);
    }
    Ok(GradedMap::new(shift, comps))
}

impl Rebuilding {
    /// Parses the format written by `Display`: the two complexes in chain
    /// format followed by `g`, `h`, `rho` as triplet matrices tagged by degree.
    pub fn parse(text: &str) -> Result<Rebuilding, RebuildError> {
        let mut lines = Lines::new(text);
        expect_keyword(&mut lines, "rebuilding")?;
        let alpha = keyed_int(&mut lines, "alpha")?;
        expect_keyword(&mut lines, "source")?;
        let source = ChainComplex::read(&mut lines)?;
        expect_keyword(&mut lines, "target")?;
        let target = ChainComplex::read(&mut lines)?;
        let g = read_map(&mut lines, "g", 0, alpha + 1)?;
        let h = read_map(&mut lines, "h", 0, alpha + 1)?;
        let rho = read_map(&mut lines, "rho", 1, alpha)?;
        if let Some((ln, _)) = lines.next_line() {
            return Err(ParseError::new(ln, "trailing content after rebuilding").into());
        }
        Rebuilding::new(alpha, source, target, g, h, rho)
    }
}

impl fmt::Display for Rebuilding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rebuilding")?;
        writeln!(f, "alpha {}", self.alpha)?;
        writeln!(f, "source")?;
        write!(f, "{}", self.source)?;
        writeln!(f, "target")?;
        write!(f, "{}", self.target)?;
        for (name, m) in [("g", &self.g), ("h", &self.h), ("rho", &self.rho)] {
            writeln!(f, "map {name}")?;
            for (j, c) in m.components().iter().enumerate() {
                writeln!(f, "degree {j}")?;
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}
