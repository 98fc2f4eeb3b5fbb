use super::csc::{Accumulator, ColumnBuilder, Csc};
use super::scalar::{big_to_i64, Scalar};
use super::LinalgError;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::fmt;

#[derive(Clone, Debug)]
enum Store {
    Small(Csc<i64>),
    Big(Csc<BigInt>),
}

/// Sparse integer matrix with exact entries.
///
/// Values that fit in `i64` are kept in a compact tier; any overflow
/// promotes the whole matrix to arbitrary precision, and results are
/// demoted again whenever every entry fits.
#[derive(Clone, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    store: Store,
}

fn demote(c: Csc<BigInt>) -> Store {
    if c.vals.iter().all(|v| big_to_i64(v).is_some()) {
        Store::Small(c.map(|v| big_to_i64(v).unwrap()))
    } else {
        Store::Big(c)
    }
}

fn check_index(r: usize, c: usize, rows: usize, cols: usize) -> Result<(), LinalgError> {
    if r >= rows || c >= cols {
        return Err(LinalgError::IndexOutOfRange { row: r, col: c, rows, cols });
    }
    Ok(())
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= u32::MAX as usize, "row count exceeds u32 index range");
        IntMatrix { rows, cols, store: Store::Small(Csc::empty(cols)) }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1; n])
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let cols = d.iter().enumerate().map(|(i, v)| vec![(i as u32, *v)]).collect();
        Self::from_columns_i64(d.len(), cols)
    }

    /// Builds from per-column `(row, value)` lists; duplicates are summed.
    pub fn from_columns_i64(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Self {
        let cols = columns.len();
        debug_assert!(columns.iter().flatten().all(|(r, _)| (*r as usize) < rows));
        match Csc::from_columns(columns.clone()) {
            Some(c) => IntMatrix { rows, cols, store: Store::Small(c) },
            None => {
                let big = columns
                    .into_iter()
                    .map(|c| c.into_iter().map(|(r, v)| (r, BigInt::from(v))).collect())
                    .collect();
                IntMatrix { rows, cols, store: demote(Csc::from_columns(big).unwrap()) }
            }
        }
    }

    pub fn from_columns_big(rows: usize, columns: Vec<Vec<(u32, BigInt)>>) -> Self {
        let cols = columns.len();
        IntMatrix { rows, cols, store: demote(Csc::from_columns(columns).unwrap()) }
    }

    pub fn from_triplets_i64(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self, LinalgError> {
        let mut columns = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            check_index(r, c, rows, cols)?;
            columns[c].push((r as u32, v));
        }
        Ok(Self::from_columns_i64(rows, columns))
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self, LinalgError> {
        let mut columns = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            check_index(r, c, rows, cols)?;
            columns[c].push((r as u32, v));
        }
        Ok(Self::from_columns_big(rows, columns))
    }

    /// Row-major dense constructor, mostly for tests and examples.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut columns = vec![Vec::new(); nc];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), nc, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                if *v != 0 {
                    columns[j].push((i as u32, *v));
                }
            }
        }
        Self::from_columns_i64(nr, columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        match &self.store {
            Store::Small(c) => c.nnz(),
            Store::Big(c) => c.nnz(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    /// True when every entry fits in an `i64`.
    pub fn is_small(&self) -> bool {
        matches!(self.store, Store::Small(_))
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        assert!(r < self.rows && c < self.cols);
        match &self.store {
            Store::Small(m) => {
                let (ri, rv) = m.col(c);
                ri.binary_search(&(r as u32)).map_or(<BigInt as Zero>::zero(), |p| BigInt::from(rv[p]))
            }
            Store::Big(m) => {
                let (ri, rv) = m.col(c);
                ri.binary_search(&(r as u32)).map_or(<BigInt as Zero>::zero(), |p| rv[p].clone())
            }
        }
    }

    /// Column `c` as sorted `(row, value)` pairs.
    pub fn col(&self, c: usize) -> Vec<(usize, BigInt)> {
        match &self.store {
            Store::Small(m) => {
                let (ri, rv) = m.col(c);
                ri.iter().zip(rv).map(|(r, v)| (*r as usize, BigInt::from(*v))).collect()
            }
            Store::Big(m) => {
                let (ri, rv) = m.col(c);
                ri.iter().zip(rv).map(|(r, v)| (*r as usize, v.clone())).collect()
            }
        }
    }

    /// Column-major triplets.
    pub fn triplets(&self) -> Vec<(usize, usize, BigInt)> {
        let mut out = Vec::with_capacity(self.nnz());
        for c in 0..self.cols {
            for (r, v) in self.col(c) {
                out.push((r, c, v));
            }
        }
        out
    }

    pub(crate) fn small(&self) -> Option<&Csc<i64>> {
        match &self.store {
            Store::Small(c) => Some(c),
            Store::Big(_) => None,
        }
    }

    pub(crate) fn big(&self) -> Csc<BigInt> {
        match &self.store {
            Store::Small(c) => c.map(|v| BigInt::from(*v)),
            Store::Big(c) => c.clone(),
        }
    }

    fn from_big_csc(rows: usize, cols: usize, c: Csc<BigInt>) -> Self {
        IntMatrix { rows, cols, store: demote(c) }
    }

    /// Matrix product. Panics on shape mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        self.checked_mul(other).expect("shape mismatch in IntMatrix::mul")
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape { op: "mul", left: self.shape(), right: other.shape() });
        }
        if let (Store::Small(a), Store::Small(b)) = (&self.store, &other.store) {
            if let Some(c) = a.mul(self.rows, b) {
                return Ok(IntMatrix { rows: self.rows, cols: other.cols, store: Store::Small(c) });
            }
        }
        let c = self.big().mul(self.rows, &other.big()).unwrap();
        Ok(Self::from_big_csc(self.rows, other.cols, c))
    }

    fn lincomb(&self, alpha: i64, other: &IntMatrix, beta: i64, op: &'static str) -> IntMatrix {
        assert!(
            self.shape() == other.shape(),
            "shape mismatch in {op}: {:?} vs {:?}",
            self.shape(),
            other.shape()
        );
        if let (Store::Small(a), Store::Small(b)) = (&self.store, &other.store) {
            if let Some(c) = a.lincomb(&alpha, b, &beta) {
                return IntMatrix { rows: self.rows, cols: self.cols, store: Store::Small(c) };
            }
        }
        let c = self.big().lincomb(&BigInt::from(alpha), &other.big(), &BigInt::from(beta)).unwrap();
        Self::from_big_csc(self.rows, self.cols, c)
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        self.lincomb(1, other, 1, "add")
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.lincomb(1, other, -1, "sub")
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(-1)
    }

    pub fn scale(&self, s: i64) -> IntMatrix {
        if s == 0 {
            return IntMatrix::zeros(self.rows, self.cols);
        }
        if let Store::Small(a) = &self.store {
            if let Some(vals) = a.vals.iter().map(|v| v.checked_mul(s)).collect::<Option<Vec<_>>>() {
                let c = Csc { colptr: a.colptr.clone(), rowind: a.rowind.clone(), vals };
                return IntMatrix { rows: self.rows, cols: self.cols, store: Store::Small(c) };
            }
        }
        let s = BigInt::from(s);
        Self::from_big_csc(self.rows, self.cols, self.big().map(|v| v * &s))
    }

    pub fn transpose(&self) -> IntMatrix {
        let store = match &self.store {
            Store::Small(c) => Store::Small(c.transpose(self.rows)),
            Store::Big(c) => Store::Big(c.transpose(self.rows)),
        };
        IntMatrix { rows: self.cols, cols: self.rows, store }
    }

    /// Largest bit length among the entries.
    pub fn max_bits(&self) -> u64 {
        match &self.store {
            Store::Small(c) => c.max_bits(),
            Store::Big(c) => c.max_bits(),
        }
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> BigInt {
        let mut best = <BigInt as Zero>::zero();
        for c in 0..self.cols {
            let s: BigInt = self.col(c).iter().map(|(_, v)| v.abs()).sum();
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> BigInt {
        self.transpose().norm_one()
    }

    /// Assembles a block matrix. `blocks` holds `(block_row, block_col, matrix)`;
    /// blocks landing on the same position are summed.
    pub fn from_blocks(row_sizes: &[usize], col_sizes: &[usize], blocks: &[(usize, usize, &IntMatrix)]) -> IntMatrix {
        let mut roff = vec![0usize];
        for s in row_sizes {
            roff.push(roff.last().unwrap() + s);
        }
        let mut coff = vec![0usize];
        for s in col_sizes {
            coff.push(coff.last().unwrap() + s);
        }
        let (nr, nc) = (*roff.last().unwrap(), *coff.last().unwrap());
        let all_small = blocks.iter().all(|b| b.2.is_small());
        for (bi, bj, m) in blocks {
            assert_eq!(m.shape(), (row_sizes[*bi], col_sizes[*bj]), "block ({bi},{bj}) has wrong shape");
        }
        if all_small {
            let mut columns: Vec<Vec<(u32, i64)>> = vec![Vec::new(); nc];
            for (bi, bj, m) in blocks {
                let s = m.small().unwrap();
                for j in 0..m.cols {
                    let (ri, rv) = s.col(j);
                    let col = &mut columns[coff[*bj] + j];
                    for (r, v) in ri.iter().zip(rv) {
                        col.push((*r + roff[*bi] as u32, *v));
                    }
                }
            }
            return IntMatrix::from_columns_i64(nr, columns);
        }
        let mut columns: Vec<Vec<(u32, BigInt)>> = vec![Vec::new(); nc];
        for (bi, bj, m) in blocks {
            for j in 0..m.cols {
                for (r, v) in m.col(j) {
                    columns[coff[*bj] + j].push(((r + roff[*bi]) as u32, v));
                }
            }
        }
        IntMatrix::from_columns_big(nr, columns)
    }

    /// Submatrix on the given (sorted or unsorted) row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut rmap = vec![u32::MAX; self.rows];
        for (i, r) in rows.iter().enumerate() {
            rmap[*r] = i as u32;
        }
        let columns = cols
            .iter()
            .map(|&c| {
                self.col(c)
                    .into_iter()
                    .filter(|(r, _)| rmap[*r] != u32::MAX)
                    .map(|(r, v)| (rmap[r], v))
                    .collect()
            })
            .collect();
        IntMatrix::from_columns_big(rows.len(), columns)
    }

    pub fn to_dense_f64(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = Scalar::to_f64(&v);
        }
        d
    }

    pub fn to_dense_big(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![<BigInt as Zero>::zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// `y = |A| x` (entrywise absolute values) or `y = A x` in floating point.
    pub(crate) fn matvec_f64(&self, x: &[f64], abs: bool) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        match &self.store {
            Store::Small(m) => {
                for c in 0..self.cols {
                    let xc = x[c];
                    if xc == 0.0 {
                        continue;
                    }
                    let (ri, rv) = m.col(c);
                    for (r, v) in ri.iter().zip(rv) {
                        let v = if abs { (*v as f64).abs() } else { *v as f64 };
                        y[*r as usize] += v * xc;
                    }
                }
            }
            Store::Big(m) => {
                for c in 0..self.cols {
                    let (ri, rv) = m.col(c);
                    for (r, v) in ri.iter().zip(rv) {
                        let f = Scalar::to_f64(v);
                        y[*r as usize] += if abs { f.abs() } else { f } * x[c];
                    }
                }
            }
        }
        y
    }

    /// `y = Aᵀ x` or `|A|ᵀ x`.
    pub(crate) fn tmatvec_f64(&self, x: &[f64], abs: bool) -> Vec<f64> {
        let mut y = vec![0.0; self.cols];
        match &self.store {
            Store::Small(m) => {
                for (c, yc) in y.iter_mut().enumerate() {
                    let (ri, rv) = m.col(c);
                    let mut s = 0.0;
                    for (r, v) in ri.iter().zip(rv) {
                        let v = if abs { (*v as f64).abs() } else { *v as f64 };
                        s += v * x[*r as usize];
                    }
                    *yc = s;
                }
            }
            Store::Big(m) => {
                for (c, yc) in y.iter_mut().enumerate() {
                    let (ri, rv) = m.col(c);
                    let mut s = 0.0;
                    for (r, v) in ri.iter().zip(rv) {
                        let f = Scalar::to_f64(v);
                        s += if abs { f.abs() } else { f } * x[*r as usize];
                    }
                    *yc = s;
                }
            }
        }
        y
    }

    /// Largest number of stored entries in any column and in any row.
    pub fn max_degrees(&self) -> (usize, usize) {
        let mut rowc = vec![0usize; self.rows];
        let mut colmax = 0;
        for c in 0..self.cols {
            let col = self.col_rows(c);
            colmax = colmax.max(col.len());
            for r in col {
                rowc[r as usize] += 1;
            }
        }
        (colmax, rowc.into_iter().max().unwrap_or(0))
    }

    fn col_rows(&self, c: usize) -> Vec<u32> {
        match &self.store {
            Store::Small(m) => m.col(c).0.to_vec(),
            Store::Big(m) => m.col(c).0.to_vec(),
        }
    }
}

impl PartialEq for IntMatrix {
    fn eq(&self, other: &Self) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        match (&self.store, &other.store) {
            (Store::Small(a), Store::Small(b)) => a == b,
            (Store::Big(a), Store::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for IntMatrix {}

/// Evaluates `Σ coeff · M₁ M₂ ⋯ M_k · e_c` column by column and hands each
/// resulting sparse column to `visit`. Keeps memory at one column.
///
/// Every term must produce a vector of length `out_rows`.
pub(crate) fn for_each_combined_column(
    terms: &[(i64, Vec<&IntMatrix>)],
    ncols: usize,
    out_rows: usize,
    mut visit: impl FnMut(usize, Vec<(u32, BigInt)>) -> bool,
) {
    let small: Option<Vec<(i64, Vec<&Csc<i64>>)>> = terms
        .iter()
        .map(|(s, ms)| ms.iter().map(|m| m.small()).collect::<Option<Vec<_>>>().map(|v| (*s, v)))
        .collect();
    let heights: Vec<Vec<usize>> = terms.iter().map(|(_, ms)| ms.iter().map(|m| m.rows()).collect()).collect();
    if let Some(small) = small {
        let mut scratch = ColumnScratch::<i64>::new(&heights, out_rows);
        for c in 0..ncols {
            match eval_column(&small, &heights, c, &mut scratch) {
                Some(col) => {
                    let col = col.into_iter().map(|(r, v)| (r, BigInt::from(v))).collect();
                    if !visit(c, col) {
                        return;
                    }
                }
                None => {
                    let big = big_terms(terms);
                    let refs: Vec<(BigInt, Vec<&Csc<BigInt>>)> =
                        big.iter().map(|(s, ms)| (s.clone(), ms.iter().collect())).collect();
                    let mut bs = ColumnScratch::<BigInt>::new(&heights, out_rows);
                    let col = eval_column(&refs, &heights, c, &mut bs).unwrap();
                    if !visit(c, col) {
                        return;
                    }
                }
            }
        }
        return;
    }
    let big = big_terms(terms);
    let refs: Vec<(BigInt, Vec<&Csc<BigInt>>)> = big.iter().map(|(s, ms)| (s.clone(), ms.iter().collect())).collect();
    let mut bs = ColumnScratch::<BigInt>::new(&heights, out_rows);
    for c in 0..ncols {
        let col = eval_column(&refs, &heights, c, &mut bs).unwrap();
        if !visit(c, col) {
            return;
        }
    }
}

fn big_terms(terms: &[(i64, Vec<&IntMatrix>)]) -> Vec<(BigInt, Vec<Csc<BigInt>>)> {
    terms.iter().map(|(s, ms)| (BigInt::from(*s), ms.iter().map(|m| m.big()).collect())).collect()
}

struct ColumnScratch<T> {
    accs: Vec<Accumulator<T>>,
    index: std::collections::HashMap<usize, usize>,
    out: Accumulator<T>,
}

impl<T: Scalar> ColumnScratch<T> {
    fn new(heights: &[Vec<usize>], out_rows: usize) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut accs = Vec::new();
        for h in heights.iter().flatten() {
            index.entry(*h).or_insert_with(|| {
                accs.push(Accumulator::new(*h));
                accs.len() - 1
            });
        }
        ColumnScratch { accs, index, out: Accumulator::new(out_rows) }
    }
}

trait AsCsc<T> {
    fn csc(&self) -> &Csc<T>;
}
impl<T> AsCsc<T> for &Csc<T> {
    fn csc(&self) -> &Csc<T> {
        self
    }
}

fn eval_column<T: Scalar, M: AsCsc<T>>(
    terms: &[(T, Vec<M>)],
    heights: &[Vec<usize>],
    c: usize,
    scratch: &mut ColumnScratch<T>,
) -> Option<Vec<(u32, T)>> {
    let res = (|| {
        for (t, (coeff, ms)) in terms.iter().enumerate() {
            let mut v: Vec<(u32, T)> = vec![(c as u32, T::from_i64(1))];
            for (k, m) in ms.iter().enumerate().rev() {
                if v.is_empty() {
                    break;
                }
                let acc = &mut scratch.accs[scratch.index[&heights[t][k]]];
                for (j, x) in &v {
                    let (ri, rv) = m.csc().col(*j as usize);
                    acc.add_scaled_col(ri, rv, x)?;
                }
                v = acc.drain();
            }
            for (r, x) in &v {
                scratch.out.add(*r, &x.mul(coeff)?)?;
            }
        }
        Some(())
    })();
    match res {
        Some(()) => Some(scratch.out.drain()),
        None => {
            for a in &mut scratch.accs {
                a.clear();
            }
            scratch.out.clear();
            None
        }
    }
}

impl fmt::Display for IntMatrix {
    /// Triplet exchange format: `rows cols nnz` then `row col value` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for c in 0..self.cols {
            for (r, v) in self.col(c) {
                writeln!(f, "{r} {c} {v}")?;
            }
        }
        Ok(())
    }
}

/// Column-at-a-time construction of a matrix with `i64` entries.
pub(crate) struct SmallColumns {
    rows: usize,
    b: ColumnBuilder<i64>,
}

impl SmallColumns {
    pub(crate) fn new(rows: usize, cols: usize, nnz: usize) -> Self {
        SmallColumns { rows, b: ColumnBuilder::with_capacity(cols, nnz) }
    }

    /// Appends a column; duplicates are summed. `None` on `i64` overflow.
    pub(crate) fn push(&mut self, col: Vec<(u32, i64)>) -> Option<()> {
        debug_assert!(col.iter().all(|(r, _)| (*r as usize) < self.rows));
        self.b.push_col(col)
    }

    pub(crate) fn finish(self) -> IntMatrix {
        let c = self.b.finish();
        IntMatrix { rows: self.rows, cols: c.ncols(), store: Store::Small(c) }
    }
}

impl IntMatrix {
    /// Column `j` when the matrix is in the `i64` tier.
    pub(crate) fn small_col(&self, j: usize) -> Option<(&[u32], &[i64])> {
        self.small().map(|s| s.col(j))
    }
}
