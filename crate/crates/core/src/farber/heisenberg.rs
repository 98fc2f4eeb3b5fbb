use super::{FarberError, PermutationAction};
use std::collections::BTreeMap;

/// `(a, b, c)` in the Heisenberg group mod `n`, with
/// `(a, b, c)(a′, b′, c′) = (a + a′, b + b′, c + c′ + ab′)`.
/// `X = (1, 0, 0)`, `Y = (0, 1, 0)` and `[X, Y] = XYX⁻¹Y⁻¹ = (0, 0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeisenbergElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl HeisenbergElement {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        HeisenbergElement { a, b, c }
    }

    fn mul(self, o: Self, n: i64) -> Self {
        HeisenbergElement {
            a: (self.a + o.a).rem_euclid(n),
            b: (self.b + o.b).rem_euclid(n),
            c: (self.c + o.c + self.a * o.b).rem_euclid(n),
        }
    }

    fn index(self, n: i64) -> usize {
        (self.a + n * (self.b + n * self.c)) as usize
    }

    fn from_index(i: usize, n: i64) -> Self {
        let i = i as i64;
        HeisenbergElement { a: i % n, b: (i / n) % n, c: i / (n * n) }
    }
}

/// Left multiplication on `G/K` for a finite group `G` given by its size and
/// multiplication on indices, with identity `0`; cosets are numbered by
/// their least element.
fn coset_action(size: usize, mul: impl Fn(usize, usize) -> usize, subgroup: &[usize], gens: &[(&str, usize)]) -> Result<PermutationAction, FarberError> {
    // Closure of the subgroup generators (finite group: products suffice).
    let mut in_k = vec![false; size];
    in_k[0] = true;
    let mut k = vec![0];
    let mut i = 0;
    while i < k.len() {
        for &s in subgroup {
            let y = mul(k[i], s);
            if !in_k[y] {
                in_k[y] = true;
                k.push(y);
            }
        }
        i += 1;
    }
    let mut coset = vec![u32::MAX; size];
    let mut count = 0u32;
    for h in 0..size {
        if coset[h] == u32::MAX {
            for &x in &k {
                coset[mul(h, x)] = count;
            }
            count += 1;
        }
    }
    let rep: Vec<usize> = {
        let mut r = vec![usize::MAX; count as usize];
        for h in (0..size).rev() {
            r[coset[h] as usize] = h;
        }
        r
    };
    let mut out = BTreeMap::new();
    for &(name, g) in gens {
        out.insert(name.to_string(), rep.iter().map(|&h| coset[mul(g, h)]).collect());
    }
    PermutationAction::new(count as usize, out)
}

/// The Heisenberg group, generators `X`, `Y`, acting on the cosets of the
/// subgroup generated by `subgroup` and all elements with coordinates in `nℤ`.
pub fn heisenberg_coset_action(n: u32, subgroup: &[HeisenbergElement]) -> Result<PermutationAction, FarberError> {
    if n == 0 {
        return Err(FarberError::Invalid("modulus must be positive".into()));
    }
    let m = n as i64;
    let size = (m * m * m) as usize;
    let norm = |e: HeisenbergElement| HeisenbergElement::new(e.a.rem_euclid(m), e.b.rem_euclid(m), e.c.rem_euclid(m)).index(m);
    let k: Vec<usize> = subgroup.iter().map(|&e| norm(e)).collect();
    let x = HeisenbergElement::new(1 % m, 0, 0).index(m);
    let y = HeisenbergElement::new(0, 1 % m, 0).index(m);
    coset_action(size, |i, j| HeisenbergElement::from_index(i, m).mul(HeisenbergElement::from_index(j, m), m).index(m), &k, &[("X", x), ("Y", y)])
}

/// `ℤ²` with generators `a`, `b` acting on the cosets of the subgroup
/// generated by `subgroup` and `(nℤ)²`.
pub fn torus_coset_action(n: u32, subgroup: &[(i64, i64)]) -> Result<PermutationAction, FarberError> {
    if n == 0 {
        return Err(FarberError::Invalid("modulus must be positive".into()));
    }
    let m = n as usize;
    let idx = |(p, q): (i64, i64)| p.rem_euclid(m as i64) as usize + m * q.rem_euclid(m as i64) as usize;
    let k: Vec<usize> = subgroup.iter().map(|&v| idx(v)).collect();
    coset_action(m * m, |i, j| (i % m + j % m) % m + m * ((i / m + j / m) % m), &k, &[("a", idx((1, 0))), ("b", idx((0, 1)))])
}
