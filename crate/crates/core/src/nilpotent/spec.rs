use super::hnf::{mat_pow, Hnf};
use super::{NilpotentError, UnipotentTower};
use crate::text::{parse_ints, Lines, ParseError};

/// Level `k` of a finite-index subgroup: generated over the lower subgroup by
/// `a·t^ℓ` with `a ∈ ℤ^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    pub jump: u64,
    pub correction: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub levels: Vec<LevelSpec>,
}

impl SubgroupSpec {
    /// Level `k` takes `ℓ = H_kk` and `a` from the entries of column `k` above the diagonal.
    pub fn from_hnf(h: &Hnf) -> Self {
        let levels = (0..h.rank())
            .map(|k| LevelSpec { jump: h.get(k, k) as u64, correction: h.column(k)[..k].to_vec() })
            .collect();
        SubgroupSpec { levels }
    }

    /// `ℓ = N`, `a = 0` on every level: the kernel of reduction mod `N` on the
    /// Heisenberg group, of index `N³`.
    pub fn heisenberg_mod(n: u64) -> Self {
        SubgroupSpec { levels: (0..3).map(|k| LevelSpec { jump: n, correction: vec![0; k] }).collect() }
    }

    pub fn index(&self) -> u64 {
        self.levels.iter().map(|l| l.jump).product()
    }

    /// `Λ₁ ⊂ ℤ^k`, spanned by the first `k` levels.
    pub fn lower_lattice(&self, k: usize) -> Result<Hnf, NilpotentError> {
        let gens: Vec<Vec<i64>> = self.levels[..k]
            .iter()
            .map(|l| {
                let mut c = l.correction.clone();
                c.push(l.jump as i64);
                c.resize(k, 0);
                c
            })
            .collect();
        Hnf::from_generators(k, &gens)
    }

    pub fn validate(&self, tower: &UnipotentTower) -> Result<(), NilpotentError> {
        let h = tower.hirsch_length();
        if self.levels.len() != h {
            return Err(NilpotentError::Invalid(format!(
                "subgroup has {} levels, tower has {h}",
                self.levels.len()
            )));
        }
        for (k, l) in self.levels.iter().enumerate() {
            if l.jump == 0 || l.jump > i64::MAX as u64 {
                return Err(NilpotentError::Invalid(format!("level {}: ℓ must be positive", k + 1)));
            }
            if l.correction.len() != k {
                return Err(NilpotentError::Invalid(format!(
                    "level {}: correction needs {k} entries, found {}",
                    k + 1,
                    l.correction.len()
                )));
            }
        }
        if h > 0 && !tower.is_abelian() {
            let lower = self.lower_lattice(h - 1)?;
            let ml = mat_pow(tower.top_matrix(), self.levels[h - 1].jump)?;
            if lower.transform(&ml)? != lower {
                return Err(NilpotentError::Invalid("M^ℓ must preserve the lower lattice".into()));
            }
        }
        Ok(())
    }

    /// Reads `tower <name>` followed by either one `level ℓ=<int> a=<ints>` line
    /// per level (bottom first, `a` comma-separated, empty on level 1) or, for
    /// abelian towers, `hnf` and the rows of an upper-triangular HNF.
    pub fn parse(text: &str) -> Result<(UnipotentTower, SubgroupSpec), NilpotentError> {
        let mut lines = Lines::new(text);
        let (ln, l) = lines.expect_line("tower")?;
        let name = match l.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["tower", name] => *name,
            _ => return Err(ParseError::new(ln, "expected `tower <name>`").into()),
        };
        let tower = UnipotentTower::by_name(name)
            .ok_or_else(|| ParseError::new(ln, format!("unknown tower `{name}`")))?;
        let h = tower.hirsch_length();
        let (ln, first) = lines.expect_line("subgroup levels")?;
        let spec = if first == "hnf" {
            if !tower.is_abelian() {
                return Err(ParseError::new(ln, "`hnf` applies to abelian towers only").into());
            }
            let mut rows = Vec::with_capacity(h);
            for _ in 0..h {
                let (rl, row) = lines.expect_line("HNF row")?;
                rows.push(parse_ints::<i64>(rl, row)?);
            }
            let hnf = Hnf::from_rows(&rows).map_err(|e| ParseError::new(ln, e.to_string()))?;
            SubgroupSpec::from_hnf(&hnf)
        } else {
            let mut levels = vec![parse_level(ln, first)?];
            for _ in 1..h {
                let (l2, t) = lines.expect_line("level")?;
                levels.push(parse_level(l2, t)?);
            }
            SubgroupSpec { levels }
        };
        if let Some((ln, _)) = lines.next_line() {
            return Err(ParseError::new(ln, "trailing content after subgroup").into());
        }
        spec.validate(&tower)?;
        Ok((tower, spec))
    }
}

fn parse_level(ln: usize, text: &str) -> Result<LevelSpec, ParseError> {
    let mut parts = text.split_whitespace();
    if parts.next() != Some("level") {
        return Err(ParseError::new(ln, "expected `level ℓ=<int> a=<ints>`"));
    }
    let mut jump = None;
    let mut correction = None;
    for p in parts {
        if let Some(v) = p.strip_prefix("ℓ=").or_else(|| p.strip_prefix("l=")) {
            jump = Some(v.parse::<u64>().map_err(|_| ParseError::new(ln, format!("invalid ℓ `{v}`")))?);
        } else if let Some(v) = p.strip_prefix("a=") {
            let vals = if v.is_empty() {
                Vec::new()
            } else {
                v.split(',')
                    .map(|x| x.parse::<i64>().map_err(|_| ParseError::new(ln, format!("invalid entry `{x}` in a"))))
                    .collect::<Result<_, _>>()?
            };
            correction = Some(vals);
        } else {
            return Err(ParseError::new(ln, format!("unexpected `{p}`")));
        }
    }
    match (jump, correction) {
        (Some(jump), c) => Ok(LevelSpec { jump, correction: c.unwrap_or_default() }),
        _ => Err(ParseError::new(ln, "missing ℓ=")),
    }
}
