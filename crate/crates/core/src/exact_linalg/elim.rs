//! Sparse elimination for invariant factors over ℤ and ranks over 𝔽_p.
//!
//! Pivots are chosen by a Markowitz-style rule (short column first, then
//! the shortest row). A pivot that divides everything in its row and
//! column splits off as a diagonal entry; what remains is handed to the
//! dense Smith reduction.

use super::scalar::Scalar;
use super::smith::{dense_factors, normalize_diagonal};
use super::{Caps, IntMatrix, LinalgError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

trait Ring {
    type E: Clone + std::fmt::Debug;
    fn is_zero(e: &Self::E) -> bool;
    fn is_unit(e: &Self::E) -> bool;
    /// `x / p` when `p` divides `x`.
    fn exact_div(&self, x: &Self::E, p: &Self::E) -> Option<Self::E>;
    /// `a - q * b`
    fn sub_mul(&self, a: &Self::E, q: &Self::E, b: &Self::E) -> Option<Self::E>;
    fn too_big(&self, e: &Self::E) -> bool;
    fn zero(&self) -> Self::E;
    /// Size key for choosing small pivots; saturates.
    fn magnitude(e: &Self::E) -> u64;
}

struct IntRing<T>(u64, std::marker::PhantomData<T>);

impl<T: Scalar> Ring for IntRing<T> {
    type E = T;
    fn is_zero(e: &T) -> bool {
        e.is_zero()
    }
    fn is_unit(e: &T) -> bool {
        e.is_unit()
    }
    fn exact_div(&self, x: &T, p: &T) -> Option<T> {
        if p.is_unit() {
            return x.mul(p);
        }
        let (q, r) = x.to_big().div_rem(&p.to_big());
        if !Zero::is_zero(&r) {
            return None;
        }
        from_big::<T>(&q)
    }
    fn sub_mul(&self, a: &T, q: &T, b: &T) -> Option<T> {
        a.sub(&q.mul(b)?)
    }
    fn too_big(&self, e: &T) -> bool {
        e.bits() > self.0
    }
    fn zero(&self) -> T {
        T::zero()
    }
    fn magnitude(e: &T) -> u64 {
        let b = e.to_big().abs();
        u64::try_from(b).unwrap_or(u64::MAX)
    }
}

fn from_big<T: Scalar>(v: &BigInt) -> Option<T> {
    T::from_big(v)
}

struct ModP(u64);

impl Ring for ModP {
    type E = u64;
    fn is_zero(e: &u64) -> bool {
        *e == 0
    }
    fn is_unit(e: &u64) -> bool {
        *e != 0
    }
    fn exact_div(&self, x: &u64, p: &u64) -> Option<u64> {
        Some(mulmod(*x, inv_mod(*p, self.0), self.0))
    }
    fn sub_mul(&self, a: &u64, q: &u64, b: &u64) -> Option<u64> {
        let t = mulmod(*q, *b, self.0);
        Some((*a + self.0 - t) % self.0)
    }
    fn too_big(&self, _: &u64) -> bool {
        false
    }
    fn zero(&self) -> u64 {
        0
    }
    fn magnitude(_: &u64) -> u64 {
        1
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i128) as u64
}

enum Outcome<E> {
    Done { pivots: Vec<E>, rest: Vec<Vec<(u32, E)>>, rest_cols: Vec<u32> },
    Overflow,
    BitCap(u64),
}

/// Row-major working copy. Column membership lists may hold stale rows; the
/// counts are exact.
struct Work<R: Ring> {
    ring: R,
    rows: Vec<Vec<(u32, R::E)>>,
    row_alive: Vec<bool>,
    col_rows: Vec<Vec<u32>>,
    col_count: Vec<usize>,
    col_alive: Vec<bool>,
}

impl<R: Ring> Work<R> {
    fn new(ring: R, nrows: usize, ncols: usize, rows: Vec<Vec<(u32, R::E)>>) -> Self {
        let mut col_rows = vec![Vec::new(); ncols];
        let mut col_count = vec![0; ncols];
        for (i, r) in rows.iter().enumerate() {
            for (c, _) in r {
                col_rows[*c as usize].push(i as u32);
                col_count[*c as usize] += 1;
            }
        }
        Work { ring, rows, row_alive: vec![true; nrows], col_rows, col_count, col_alive: vec![true; ncols] }
    }

    fn entry(&self, r: usize, c: u32) -> Option<&R::E> {
        let row = &self.rows[r];
        row.binary_search_by_key(&c, |e| e.0).ok().map(|p| &row[p].1)
    }

    fn live_rows_of(&mut self, c: usize) -> Vec<u32> {
        let mut v = std::mem::take(&mut self.col_rows[c]);
        v.sort_unstable();
        v.dedup();
        let rows = &self.rows;
        let alive = &self.row_alive;
        v.retain(|&r| alive[r as usize] && rows[r as usize].binary_search_by_key(&(c as u32), |e| e.0).is_ok());
        self.col_rows[c] = v.clone();
        v
    }

    /// Eliminates pivot `(r, c)`; requires the pivot to divide its column.
    /// `Err(None)` signals fixed-width overflow, `Err(Some(_))` a bit-cap hit.
    fn eliminate(&mut self, r: usize, c: u32) -> Result<(), Option<u64>> {
        let p = self.entry(r, c).unwrap().clone();
        let prow = self.rows[r].clone();
        for other in self.live_rows_of(c as usize) {
            let o = other as usize;
            if o == r {
                continue;
            }
            let x = self.entry(o, c).unwrap().clone();
            let q = self.ring.exact_div(&x, &p).ok_or(None)?;
            let old = std::mem::take(&mut self.rows[o]);
            let mut merged = Vec::with_capacity(old.len() + prow.len());
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < prow.len() {
                if j >= prow.len() || (i < old.len() && old[i].0 < prow[j].0) {
                    merged.push(old[i].clone());
                    i += 1;
                } else if i >= old.len() || prow[j].0 < old[i].0 {
                    let col = prow[j].0;
                    let v = self.ring.sub_mul(&self.ring.zero(), &q, &prow[j].1).ok_or(None)?;
                    if !R::is_zero(&v) {
                        if self.ring.too_big(&v) {
                            return Err(Some(0));
                        }
                        self.col_rows[col as usize].push(other);
                        self.col_count[col as usize] += 1;
                        merged.push((col, v));
                    }
                    j += 1;
                } else {
                    let col = old[i].0;
                    let v = self.ring.sub_mul(&old[i].1, &q, &prow[j].1).ok_or(None)?;
                    if R::is_zero(&v) {
                        self.col_count[col as usize] -= 1;
                    } else {
                        if self.ring.too_big(&v) {
                            return Err(Some(0));
                        }
                        merged.push((col, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            self.rows[o] = merged;
        }
        for (col, _) in &self.rows[r] {
            self.col_count[*col as usize] -= 1;
        }
        self.row_alive[r] = false;
        self.col_alive[c as usize] = false;
        self.col_rows[c as usize].clear();
        Ok(())
    }

    fn divides_row(&self, r: usize, p: &R::E) -> bool {
        self.rows[r].iter().all(|(_, v)| self.ring.exact_div(v, p).is_some())
    }

    fn run(mut self) -> Outcome<R::E> {
        let mut pivots: Vec<R::E> = Vec::new();
        let ncols = self.col_count.len();
        // Phase 1: unit pivots, sparsest column first.
        let mut progress = true;
        while progress {
            progress = false;
            let mut heap: BinaryHeap<Reverse<(usize, u32)>> = (0..ncols)
                .filter(|&c| self.col_alive[c] && self.col_count[c] > 0)
                .map(|c| Reverse((self.col_count[c], c as u32)))
                .collect();
            while let Some(Reverse((cnt, c))) = heap.pop() {
                let cu = c as usize;
                if !self.col_alive[cu] || self.col_count[cu] == 0 {
                    continue;
                }
                if cnt != self.col_count[cu] {
                    heap.push(Reverse((self.col_count[cu], c)));
                    continue;
                }
                let mut best: Option<(usize, usize)> = None;
                for r in self.live_rows_of(cu) {
                    let r = r as usize;
                    if R::is_unit(self.entry(r, c).unwrap()) {
                        let len = self.rows[r].len();
                        if best.is_none_or(|(_, l)| len < l) {
                            best = Some((r, len));
                        }
                    }
                }
                if let Some((r, _)) = best {
                    let touched: Vec<u32> = self.rows[r].iter().map(|e| e.0).collect();
                    match self.eliminate(r, c) {
                        Ok(()) => {}
                        Err(None) => return Outcome::Overflow,
                        Err(Some(b)) => return Outcome::BitCap(b),
                    }
                    pivots.push(self.rows[r].iter().find(|e| e.0 == c).unwrap().1.clone());
                    progress = true;
                    for t in touched {
                        if self.col_alive[t as usize] && self.col_count[t as usize] > 0 {
                            heap.push(Reverse((self.col_count[t as usize], t)));
                        }
                    }
                }
            }
            // Phase 2: a smallest-magnitude entry that divides its row and column.
            if !progress {
                let mut cand: Vec<(u64, u32, u32)> = Vec::new();
                for c in 0..ncols {
                    if !self.col_alive[c] || self.col_count[c] == 0 {
                        continue;
                    }
                    for r in self.live_rows_of(c) {
                        let v = self.entry(r as usize, c as u32).unwrap();
                        cand.push((R::magnitude(v), r, c as u32));
                    }
                }
                cand.sort_unstable();
                for (_, r, c) in cand.into_iter().take(64) {
                    let p = self.entry(r as usize, c).unwrap().clone();
                    let col_ok = self
                        .live_rows_of(c as usize)
                        .iter()
                        .all(|&o| self.ring.exact_div(self.entry(o as usize, c).unwrap(), &p).is_some());
                    if col_ok && self.divides_row(r as usize, &p) {
                        match self.eliminate(r as usize, c) {
                            Ok(()) => {}
                            Err(None) => return Outcome::Overflow,
                            Err(Some(b)) => return Outcome::BitCap(b),
                        }
                        pivots.push(p);
                        progress = true;
                        break;
                    }
                }
            }
        }
        let mut rest_cols: Vec<u32> =
            (0..ncols).filter(|&c| self.col_alive[c] && self.col_count[c] > 0).map(|c| c as u32).collect();
        rest_cols.sort_unstable();
        let alive = std::mem::take(&mut self.row_alive);
        let rest: Vec<Vec<(u32, R::E)>> = std::mem::take(&mut self.rows)
            .into_iter()
            .zip(alive)
            .filter(|(row, a)| *a && !row.is_empty())
            .map(|(row, _)| row)
            .collect();
        Outcome::Done { pivots, rest, rest_cols }
    }
}

fn rows_of<T: Scalar>(a: &IntMatrix, conv: impl Fn(&BigInt) -> T) -> Vec<Vec<(u32, T)>> {
    let mut rows: Vec<Vec<(u32, T)>> = vec![Vec::new(); a.rows()];
    if let Some(s) = a.small() {
        for c in 0..a.cols() {
            let (ri, rv) = s.col(c);
            for (r, v) in ri.iter().zip(rv) {
                rows[*r as usize].push((c as u32, T::from_i64(*v)));
            }
        }
    } else {
        for (r, c, v) in a.triplets() {
            rows[r].push((c as u32, conv(&v)));
        }
    }
    rows
}

fn finish_int<T: Scalar>(
    pivots: Vec<T>,
    rest: Vec<Vec<(u32, T)>>,
    rest_cols: Vec<u32>,
    caps: &Caps,
) -> Result<Vec<BigInt>, LinalgError> {
    let mut diag: Vec<BigInt> = pivots.iter().map(|p| p.to_big()).collect();
    if !rest.is_empty() {
        let mut pos = std::collections::HashMap::new();
        for (i, c) in rest_cols.iter().enumerate() {
            pos.insert(*c, i);
        }
        let dense: Vec<Vec<BigInt>> = rest
            .iter()
            .map(|row| {
                let mut d = vec![<BigInt as Zero>::zero(); rest_cols.len()];
                for (c, v) in row {
                    d[pos[c]] = v.to_big();
                }
                d
            })
            .collect();
        diag.extend(dense_factors(dense, caps)?);
    }
    Ok(normalize_diagonal(diag))
}

/// Invariant factors (the nonzero Smith diagonal) of `a`.
pub fn invariant_factors(a: &IntMatrix, caps: &Caps) -> Result<Vec<BigInt>, LinalgError> {
    if a.is_small() {
        let rows = rows_of::<i64>(a, |_| unreachable!());
        let w = Work::new(IntRing::<i64>(caps.max_bits, Default::default()), a.rows(), a.cols(), rows);
        match w.run() {
            Outcome::Done { pivots, rest, rest_cols } => return finish_int(pivots, rest, rest_cols, caps),
            Outcome::BitCap(b) => return Err(LinalgError::BitCap { bits: b, cap: caps.max_bits }),
            Outcome::Overflow => {}
        }
    }
    let rows = rows_of::<BigInt>(a, |v| v.clone());
    let w = Work::new(IntRing::<BigInt>(caps.max_bits, Default::default()), a.rows(), a.cols(), rows);
    match w.run() {
        Outcome::Done { pivots, rest, rest_cols } => finish_int(pivots, rest, rest_cols, caps),
        Outcome::BitCap(b) => Err(LinalgError::BitCap { bits: b, cap: caps.max_bits }),
        Outcome::Overflow => unreachable!("arbitrary precision tier cannot overflow"),
    }
}

/// Rank over the rationals.
pub fn rank(a: &IntMatrix, caps: &Caps) -> Result<usize, LinalgError> {
    Ok(invariant_factors(a, caps)?.len())
}

/// Rank over 𝔽_p. `p` must be prime.
pub fn rank_mod_p(a: &IntMatrix, p: u64) -> usize {
    assert!(p >= 2, "modulus must be a prime");
    let pb = BigInt::from(p);
    let mut rows: Vec<Vec<(u32, u64)>> = vec![Vec::new(); a.rows()];
    for (r, c, v) in a.triplets() {
        let m = v.mod_floor(&pb);
        let m: u64 = m.try_into().unwrap();
        if m != 0 {
            rows[r].push((c as u32, m));
        }
    }
    let w = Work::new(ModP(p), a.rows(), a.cols(), rows);
    match w.run() {
        Outcome::Done { pivots, rest, .. } => {
            debug_assert!(rest.is_empty());
            pivots.len()
        }
        _ => unreachable!("prime field elimination cannot overflow"),
    }
}
