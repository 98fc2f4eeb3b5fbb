//! Fixed-point ratios of finite transitive actions, Farber neighborhoods,
//! and the intersection count for a subgroup.

mod heisenberg;
mod io;

pub use heisenberg::{heisenberg_coset_action, torus_coset_action, HeisenbergElement};

use crate::text::ParseError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FarberError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` is not a permutation of 0..{1}")]
    NotAPermutation(String, usize),
    #[error("action is not transitive: {0} of {1} points reachable from 0")]
    NotTransitive(usize, usize),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A letter of a group word: a generator name, possibly inverted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub name: String,
    pub inverse: bool,
}

/// A word in named generators; `w = l₁ l₂ ⋯ l_k` acts on the left, so `l_k` is applied first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    /// Whitespace-separated generator names, `name'` for inverses; `1` is the empty word.
    pub fn parse(s: &str) -> Result<Word, FarberError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, inverse) = match tok.strip_suffix('\'') {
                Some(n) => (n, true),
                None => (tok, false),
            };
            if name.is_empty() || name.contains('\'') {
                return Err(FarberError::Invalid(format!("malformed letter `{tok}`")));
            }
            letters.push(Letter { name: name.to_string(), inverse });
        }
        Ok(Word(letters))
    }

    pub fn generator(name: &str) -> Word {
        Word(vec![Letter { name: name.to_string(), inverse: false }])
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| Letter { name: l.name.clone(), inverse: !l.inverse }).collect())
    }

    pub fn then(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// `g w g⁻¹`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.then(self).then(&g.inverse())
    }

    /// Cancels adjacent inverse pairs.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for l in &self.0 {
            if out.last().is_some_and(|p| p.name == l.name && p.inverse != l.inverse) {
                out.pop();
            } else {
                out.push(l.clone());
            }
        }
        Word(out)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("{}{}", l.name, if l.inverse { "'" } else { "" })).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A transitive action of a finitely generated group on `0..n`, i.e. on the
/// cosets of a finite-index subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationAction {
    degree: usize,
    generators: BTreeMap<String, Vec<u32>>,
    inverses: BTreeMap<String, Vec<u32>>,
}

impl PermutationAction {
    pub fn new(degree: usize, generators: BTreeMap<String, Vec<u32>>) -> Result<Self, FarberError> {
        if degree == 0 {
            return Err(FarberError::Invalid("degree must be positive".into()));
        }
        let mut inverses = BTreeMap::new();
        for (name, img) in &generators {
            if name.is_empty() || name.contains('\'') || name.contains(char::is_whitespace) || name == "1" {
                return Err(FarberError::Invalid(format!("invalid generator name `{name}`")));
            }
            let mut inv = vec![u32::MAX; degree];
            if img.len() != degree {
                return Err(FarberError::NotAPermutation(name.clone(), degree));
            }
            for (i, &j) in img.iter().enumerate() {
                if j as usize >= degree || inv[j as usize] != u32::MAX {
                    return Err(FarberError::NotAPermutation(name.clone(), degree));
                }
                inv[j as usize] = i as u32;
            }
            inverses.insert(name.clone(), inv);
        }
        let a = PermutationAction { degree, generators, inverses };
        let reached = a.orbit_of(0, a.generators.values().collect::<Vec<_>>().as_slice()).len();
        if reached != degree {
            return Err(FarberError::NotTransitive(reached, degree));
        }
        Ok(a)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &BTreeMap<String, Vec<u32>> {
        &self.generators
    }

    /// The permutation of `w`: `x ↦ w·x`.
    pub fn evaluate(&self, w: &Word) -> Result<Vec<u32>, FarberError> {
        let mut perm: Vec<u32> = (0..self.degree as u32).collect();
        for l in w.0.iter().rev() {
            let table = if l.inverse { self.inverses.get(&l.name) } else { self.generators.get(&l.name) };
            let table = table.ok_or_else(|| FarberError::UnknownGenerator(l.name.clone()))?;
            for p in perm.iter_mut() {
                *p = table[*p as usize];
            }
        }
        Ok(perm)
    }

    fn orbit_of(&self, x: usize, perms: &[&Vec<u32>]) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[x] = true;
        let mut out = vec![x];
        let mut i = 0;
        while i < out.len() {
            let y = out[i];
            for p in perms {
                let z = p[y] as usize;
                if !seen[z] {
                    seen[z] = true;
                    out.push(z);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Orbits of the subgroup generated by `words`, each sorted, ordered by least point.
    pub fn orbits(&self, words: &[Word]) -> Result<Vec<Vec<usize>>, FarberError> {
        let perms = words.iter().map(|w| self.evaluate(w)).collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&Vec<u32>> = perms.iter().collect();
        let mut done = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree {
            if !done[x] {
                let o = self.orbit_of(x, &refs);
                for &y in &o {
                    done[y] = true;
                }
                out.push(o);
            }
        }
        Ok(out)
    }
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `|Fix(w)| / n`.
pub fn fixed_point_ratio(a: &PermutationAction, w: &Word) -> Result<BigRational, FarberError> {
    let p = a.evaluate(w)?;
    Ok(ratio(p.iter().enumerate().filter(|(i, &j)| *i == j as usize).count(), a.degree))
}

/// Whether the point stabilizer lies in `U_{S,δ}`: every word of `S` has ratio `< δ`.
pub fn in_neighborhood(a: &PermutationAction, s: &[Word], delta: &BigRational) -> Result<bool, FarberError> {
    check_delta(delta)?;
    for w in s {
        if fixed_point_ratio(a, w)? >= *delta {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_delta(delta: &BigRational) -> Result<(), FarberError> {
    if *delta <= BigRational::zero() || *delta > BigRational::one() {
        return Err(FarberError::Invalid(format!("δ = {delta} outside (0, 1]")));
    }
    Ok(())
}

/// Per-orbit fixed-point ratios of `γ` under the subgroup `Λ`: for the point
/// `x`, the `Λ`-orbit of `x` is the coset space of `Stab_Λ(x)`, and
/// `fx_Λ(γ)` there is `|Fix(γ) ∩ Λx| / |Λx|`. `γ` must lie in `Λ`.
pub fn orbit_ratios(a: &PermutationAction, lambda: &[Word], gamma: &Word) -> Result<Vec<(Vec<usize>, BigRational)>, FarberError> {
    let p = a.evaluate(gamma)?;
    let orbits = a.orbits(lambda)?;
    Ok(orbits
        .into_iter()
        .map(|o| {
            let fixed = o.iter().filter(|&&x| p[x] as usize == x).count();
            let r = ratio(fixed, o.len());
            (o, r)
        })
        .collect())
}

/// Fraction of points `x` with `Stab(x) ∩ Λ ∈ U_{Λ,S,δ}`; the words of `S` must lie in `Λ`.
pub fn intersection_statistic(a: &PermutationAction, lambda: &[Word], s: &[Word], delta: &BigRational) -> Result<BigRational, FarberError> {
    check_delta(delta)?;
    let orbits = a.orbits(lambda)?;
    let perms = s.iter().map(|w| a.evaluate(w)).collect::<Result<Vec<_>, _>>()?;
    let mut good = 0;
    for o in &orbits {
        let inside = perms.iter().all(|p| ratio(o.iter().filter(|&&x| p[x] as usize == x).count(), o.len()) < *delta);
        if inside {
            good += o.len();
        }
    }
    Ok(ratio(good, a.degree))
}

/// `(1/n) Σ_x fx_Λ(γ)(Stab(x) ∩ Λ)`, which equals `fx(γ)` for `γ ∈ Λ`.
pub fn averaged_orbit_ratio(a: &PermutationAction, lambda: &[Word], gamma: &Word) -> Result<BigRational, FarberError> {
    let mut sum = BigRational::zero();
    for (o, r) in orbit_ratios(a, lambda, gamma)? {
        sum += r * BigRational::from_integer(BigInt::from(o.len()));
    }
    Ok(sum / BigRational::from_integer(BigInt::from(a.degree)))
}

/// One instance of the intersection inequality with `V = U_{Γ,S,δ²/|S|}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionCheck {
    /// Whether the action's point stabilizer lies in `V`.
    pub premise: bool,
    pub statistic: BigRational,
    /// `statistic ≥ 1 − δ` whenever the premise holds.
    pub holds: bool,
}

pub fn check_intersection_lemma(
    a: &PermutationAction,
    lambda: &[Word],
    s: &[Word],
    delta: &BigRational,
) -> Result<IntersectionCheck, FarberError> {
    check_delta(delta)?;
    if s.is_empty() {
        return Err(FarberError::Invalid("S must be nonempty".into()));
    }
    let v_delta = delta * delta / BigRational::from_integer(BigInt::from(s.len()));
    let premise = in_neighborhood(a, s, &v_delta)?;
    let statistic = intersection_statistic(a, lambda, s, delta)?;
    let holds = !premise || statistic >= BigRational::one() - delta;
    Ok(IntersectionCheck { premise, statistic, holds })
}

/// Tallies of the Heisenberg sweep.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
pub struct FarberSweep {
    pub actions: usize,
    pub lemma_instances: usize,
    /// Instances whose premise holds, so the inequality is actually tested.
    pub lemma_premise: usize,
    pub lemma_failures: Vec<String>,
    pub double_count_checks: usize,
    pub double_count_failures: Vec<String>,
    pub conjugation_checks: usize,
    pub conjugation_failures: Vec<String>,
}

impl FarberSweep {
    pub fn passed(&self) -> bool {
        self.lemma_failures.is_empty() && self.double_count_failures.is_empty() && self.conjugation_failures.is_empty()
    }
}

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|w| Word::parse(w).expect("static word")).collect()
}

/// All words of length `1..=len` over the given letters and their inverses.
pub fn all_words(gens: &[&str], len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = gens
        .iter()
        .flat_map(|g| [false, true].map(|inverse| Letter { name: g.to_string(), inverse }))
        .collect();
    let mut out = Vec::new();
    let mut layer = vec![Word::default()];
    for _ in 0..len {
        layer = layer.iter().flat_map(|w| letters.iter().map(move |l| Word(w.0.iter().chain([l]).cloned().collect()))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// [`heisenberg_sweep_at`] for `n = 2..=n_max`, merged.
pub fn heisenberg_sweep(n_max: u32) -> Result<FarberSweep, FarberError> {
    let mut out = FarberSweep::default();
    for n in 2..=n_max {
        let s = heisenberg_sweep_at(n)?;
        out.actions += s.actions;
        out.lemma_instances += s.lemma_instances;
        out.lemma_premise += s.lemma_premise;
        out.lemma_failures.extend(s.lemma_failures);
        out.double_count_checks += s.double_count_checks;
        out.double_count_failures.extend(s.double_count_failures);
        out.conjugation_checks += s.conjugation_checks;
        out.conjugation_failures.extend(s.conjugation_failures);
    }
    Ok(out)
}

/// Heisenberg mod `n` on cosets of several subgroups above the congruence
/// subgroup: the intersection inequality for `V = U_{Γ,S,δ²/|S|}`, the
/// double-counting identity, and conjugation invariance of fixed-point ratios.
pub fn heisenberg_sweep_at(n: u32) -> Result<FarberSweep, FarberError> {
    let z = "X Y X' Y'";
    let subgroups: Vec<(&str, Vec<HeisenbergElement>)> = vec![
        ("1", vec![]),
        ("<X>", vec![HeisenbergElement::new(1, 0, 0)]),
        ("<Y>", vec![HeisenbergElement::new(0, 1, 0)]),
        ("<XY>", vec![HeisenbergElement::new(1, 1, 0)]),
        ("<Z>", vec![HeisenbergElement::new(0, 0, 1)]),
    ];
    let z_word = z.to_string();
    let lambdas: Vec<(&str, Vec<Word>, Vec<Vec<Word>>)> = vec![
        ("<X>", words(&["X"]), vec![words(&["X"]), words(&["X X"]), words(&["X", "X X X"])]),
        ("<Y>", words(&["Y"]), vec![words(&["Y"]), words(&["Y Y", "Y Y Y"])]),
        ("<Z>", words(&[&z_word]), vec![words(&[&z_word]), words(&[&format!("{z} {z}")])]),
        ("<X,Z>", words(&["X", &z_word]), vec![words(&["X", &z_word]), words(&[&format!("X {z}")])]),
        ("<X,Y>", words(&["X", "Y"]), vec![words(&["X", "Y", &z_word]), words(&["X Y'"])]),
    ];
    let deltas: Vec<BigRational> = [(1, 2), (1, 3), (1, 4), (3, 4), (9, 10)]
        .iter()
        .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
        .collect();
    let probes = all_words(&["X", "Y"], 3);
    let conjugators = all_words(&["X", "Y"], 2);

    let mut out = FarberSweep::default();
    for (kname, k) in &subgroups {
        let a = heisenberg_coset_action(n, k)?;
        out.actions += 1;
        let tag = |what: &str| format!("N={n} K={kname} {what}");
        for (lname, lgens, ss) in &lambdas {
            for s in ss {
                for gamma in s {
                    out.double_count_checks += 1;
                    if averaged_orbit_ratio(&a, lgens, gamma)? != fixed_point_ratio(&a, gamma)? {
                        out.double_count_failures.push(tag(&format!("Λ={lname} γ={gamma}")));
                    }
                }
                for d in &deltas {
                    let c = check_intersection_lemma(&a, lgens, s, d)?;
                    out.lemma_instances += 1;
                    out.lemma_premise += usize::from(c.premise);
                    if !c.holds {
                        out.lemma_failures.push(tag(&format!("Λ={lname} δ={d}: {}", c.statistic)));
                    }
                }
            }
        }
        for w in &probes {
            let base = fixed_point_ratio(&a, w)?;
            for g in &conjugators {
                out.conjugation_checks += 1;
                if fixed_point_ratio(&a, &w.conjugate_by(g))? != base {
                    out.conjugation_failures.push(tag(&format!("w={w} g={g}")));
                }
            }
        }
    }
    Ok(out)
}
