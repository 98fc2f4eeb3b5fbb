use super::scalar::Scalar;

/// Compressed sparse columns. Row indices are sorted within a column and
/// every stored value is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Csc<T> {
    pub colptr: Vec<usize>,
    pub rowind: Vec<u32>,
    pub vals: Vec<T>,
}

impl<T: Scalar> Csc<T> {
    pub fn empty(cols: usize) -> Self {
        Csc { colptr: vec![0; cols + 1], rowind: Vec::new(), vals: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.colptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn col(&self, j: usize) -> (&[u32], &[T]) {
        let (a, b) = (self.colptr[j], self.colptr[j + 1]);
        (&self.rowind[a..b], &self.vals[a..b])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Csc<U> {
        Csc { colptr: self.colptr.clone(), rowind: self.rowind.clone(), vals: self.vals.iter().map(f).collect() }
    }

    /// Builds from arbitrary per-column entry lists; duplicates are summed.
    pub fn from_columns(columns: Vec<Vec<(u32, T)>>) -> Option<Self> {
        let mut b = ColumnBuilder::with_capacity(columns.len(), 0);
        for c in columns {
            b.push_col(c)?;
        }
        Some(b.finish())
    }

    pub fn transpose(&self, rows: usize) -> Self {
        let mut count = vec![0usize; rows + 1];
        for &r in &self.rowind {
            count[r as usize + 1] += 1;
        }
        for i in 0..rows {
            count[i + 1] += count[i];
        }
        let colptr = count.clone();
        let mut next = count;
        let mut rowind = vec![0u32; self.nnz()];
        let mut vals: Vec<Option<T>> = vec![None; self.nnz()];
        for j in 0..self.ncols() {
            let (ri, rv) = self.col(j);
            for (r, v) in ri.iter().zip(rv) {
                let p = next[*r as usize];
                rowind[p] = j as u32;
                vals[p] = Some(v.clone());
                next[*r as usize] += 1;
            }
        }
        Csc { colptr, rowind, vals: vals.into_iter().map(|v| v.unwrap()).collect() }
    }

    /// Product `self * other` where `self` has `rows` rows.
    pub fn mul(&self, rows: usize, other: &Csc<T>) -> Option<Self> {
        let mut acc = Accumulator::new(rows);
        let mut b = ColumnBuilder::with_capacity(other.ncols(), other.nnz());
        for j in 0..other.ncols() {
            let (ki, kv) = other.col(j);
            for (k, bv) in ki.iter().zip(kv) {
                let (ri, rv) = self.col(*k as usize);
                for (r, av) in ri.iter().zip(rv) {
                    acc.add(*r, &av.mul(bv)?)?;
                }
            }
            acc.drain_into(&mut b);
        }
        Some(b.finish())
    }

    /// `alpha * self + beta * other`.
    pub fn lincomb(&self, alpha: &T, other: &Csc<T>, beta: &T) -> Option<Self> {
        let mut b = ColumnBuilder::with_capacity(self.ncols(), self.nnz() + other.nnz());
        let mut tmp = Vec::new();
        for j in 0..self.ncols() {
            let (ai, av) = self.col(j);
            let (bi, bv) = other.col(j);
            let (mut p, mut q) = (0, 0);
            tmp.clear();
            while p < ai.len() || q < bi.len() {
                if q >= bi.len() || (p < ai.len() && ai[p] < bi[q]) {
                    tmp.push((ai[p], av[p].mul(alpha)?));
                    p += 1;
                } else if p >= ai.len() || bi[q] < ai[p] {
                    tmp.push((bi[q], bv[q].mul(beta)?));
                    q += 1;
                } else {
                    tmp.push((ai[p], av[p].mul(alpha)?.add(&bv[q].mul(beta)?)?));
                    p += 1;
                    q += 1;
                }
            }
            b.push_sorted(&tmp);
        }
        Some(b.finish())
    }

    pub fn max_bits(&self) -> u64 {
        self.vals.iter().map(|v| v.bits()).max().unwrap_or(0)
    }
}

/// Dense scatter accumulator used for column-at-a-time products.
pub(crate) struct Accumulator<T> {
    vals: Vec<T>,
    used: Vec<bool>,
    touched: Vec<u32>,
}

impl<T: Scalar> Accumulator<T> {
    pub fn new(rows: usize) -> Self {
        Accumulator { vals: vec![T::zero(); rows], used: vec![false; rows], touched: Vec::new() }
    }

    #[inline]
    pub fn add(&mut self, r: u32, v: &T) -> Option<()> {
        let i = r as usize;
        if self.used[i] {
            self.vals[i] = self.vals[i].add(v)?;
        } else {
            self.used[i] = true;
            self.touched.push(r);
            self.vals[i] = v.clone();
        }
        Some(())
    }

    pub fn add_scaled_col(&mut self, rows: &[u32], vals: &[T], s: &T) -> Option<()> {
        if s.is_zero() {
            return Some(());
        }
        for (r, v) in rows.iter().zip(vals) {
            self.add(*r, &v.mul(s)?)?;
        }
        Some(())
    }

    /// Emits the sorted nonzero entries and resets.
    pub fn drain(&mut self) -> Vec<(u32, T)> {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &r in &self.touched {
            let i = r as usize;
            self.used[i] = false;
            let v = std::mem::replace(&mut self.vals[i], T::zero());
            if !v.is_zero() {
                out.push((r, v));
            }
        }
        self.touched.clear();
        out
    }

    pub fn drain_into(&mut self, b: &mut ColumnBuilder<T>) {
        self.touched.sort_unstable();
        for &r in &self.touched {
            let i = r as usize;
            self.used[i] = false;
            let v = std::mem::replace(&mut self.vals[i], T::zero());
            if !v.is_zero() {
                b.rowind.push(r);
                b.vals.push(v);
            }
        }
        self.touched.clear();
        b.colptr.push(b.rowind.len());
    }

    pub fn clear(&mut self) {
        for &r in &self.touched {
            self.used[r as usize] = false;
            self.vals[r as usize] = T::zero();
        }
        self.touched.clear();
    }
}

pub(crate) struct ColumnBuilder<T> {
    colptr: Vec<usize>,
    rowind: Vec<u32>,
    vals: Vec<T>,
}

impl<T: Scalar> ColumnBuilder<T> {
    pub fn with_capacity(cols: usize, nnz: usize) -> Self {
        let mut colptr = Vec::with_capacity(cols + 1);
        colptr.push(0);
        ColumnBuilder { colptr, rowind: Vec::with_capacity(nnz), vals: Vec::with_capacity(nnz) }
    }

    /// Appends an already sorted, duplicate-free column; zeros are skipped.
    pub fn push_sorted(&mut self, col: &[(u32, T)]) {
        for (r, v) in col {
            if !v.is_zero() {
                self.rowind.push(*r);
                self.vals.push(v.clone());
            }
        }
        self.colptr.push(self.rowind.len());
    }

    pub fn push_col(&mut self, mut col: Vec<(u32, T)>) -> Option<()> {
        col.sort_by_key(|e| e.0);
        let start = self.rowind.len();
        for (r, v) in col {
            if self.rowind.len() > start && *self.rowind.last().unwrap() == r {
                let last = self.vals.last_mut().unwrap();
                *last = last.add(&v)?;
            } else {
                self.rowind.push(r);
                self.vals.push(v);
            }
        }
        let mut w = start;
        for k in start..self.rowind.len() {
            if !self.vals[k].is_zero() {
                self.rowind.swap(w, k);
                self.vals.swap(w, k);
                w += 1;
            }
        }
        self.rowind.truncate(w);
        self.vals.truncate(w);
        self.colptr.push(w);
        Some(())
    }

    pub fn finish(self) -> Csc<T> {
        Csc { colptr: self.colptr, rowind: self.rowind, vals: self.vals }
    }
}
