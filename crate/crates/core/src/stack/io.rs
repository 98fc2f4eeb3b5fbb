use super::{BaseCell, StackComplex, StackError};
use crate::chain::{ChainComplex, GradedMap};
use crate::exact_linalg::IntMatrix;
use crate::text::{Lines, ParseError};
use std::collections::BTreeMap;
use std::path::Path;

impl StackComplex {
    /// Parses the stack format:
    ///
    /// ```text
    /// stack <number of base cells>
    /// cell <id> <dim> <fiber chain file>
    /// horizontal <id e> <id e′> <fiber degree>
    /// <triplet matrix>
    /// ```
    ///
    /// Fiber files are fetched through `resolve`. Missing horizontal
    /// components are zero.
    pub fn parse_with<F>(text: &str, mut resolve: F) -> Result<StackComplex, StackError>
    where
        F: FnMut(&str) -> Result<String, String>,
    {
        let mut lines = Lines::new(text);
        let (ln, head) = lines.expect_line("`stack <count>`")?;
        let count: usize = match head.split_whitespace().collect::<Vec<_>>()[..] {
            ["stack", n] => n.parse().map_err(|_| ParseError::new(ln, format!("invalid count `{n}`")))?,
            _ => return Err(ParseError::new(ln, "expected `stack <count>`").into()),
        };
        let mut base = Vec::with_capacity(count);
        let mut fibers = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, l) = lines.expect_line("`cell <id> <dim> <file>`")?;
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 4 || t[0] != "cell" {
                return Err(ParseError::new(ln, "expected `cell <id> <dim> <file>`").into());
            }
            let dim: usize = t[2].parse().map_err(|_| ParseError::new(ln, format!("invalid dimension `{}`", t[2])))?;
            let body = resolve(t[3]).map_err(|msg| StackError::Io { path: t[3].to_string(), msg })?;
            let fiber = ChainComplex::parse(&body)
                .map_err(|e| ParseError::new(ln, format!("fiber `{}`: {e}", t[3])))?;
            base.push(BaseCell::new(t[1], dim));
            fibers.push(fiber);
        }
        let index = |ln: usize, id: &str| {
            base.iter().position(|b| b.id == id).ok_or_else(|| ParseError::new(ln, format!("unknown base cell `{id}`")))
        };
        let mut blocks: BTreeMap<(usize, usize), BTreeMap<usize, IntMatrix>> = BTreeMap::new();
        while let Some((ln, l)) = lines.next_line() {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 4 || t[0] != "horizontal" {
                return Err(ParseError::new(ln, "expected `horizontal <e> <e′> <degree>`").into());
            }
            let (e, f) = (index(ln, t[1])?, index(ln, t[2])?);
            let k: usize = t[3].parse().map_err(|_| ParseError::new(ln, format!("invalid degree `{}`", t[3])))?;
            if base[f].dim >= base[e].dim {
                return Err(ParseError::new(ln, format!("`{}` → `{}` does not lower the base dimension", t[1], t[2])).into());
            }
            if k > fibers[e].top_degree() {
                return Err(ParseError::new(ln, format!("degree {k} above the top of fiber `{}`", t[1])).into());
            }
            let m = IntMatrix::read_triplets(&mut lines)?;
            let kf = k + base[e].dim - base[f].dim - 1;
            let want = (if kf <= fibers[f].top_degree() { fibers[f].dim(kf) } else { 0 }, fibers[e].dim(k));
            if m.shape() != want {
                return Err(ParseError::new(ln, format!("block is {}x{}, expected {}x{}", m.rows(), m.cols(), want.0, want.1)).into());
            }
            if blocks.entry((e, f)).or_default().insert(k, m).is_some() {
                return Err(ParseError::new(ln, "duplicate horizontal block").into());
            }
        }
        let mut horizontal = BTreeMap::new();
        for ((e, f), mut comps) in blocks {
            let shift = base[e].dim - base[f].dim - 1;
            let full = (0..=fibers[e].top_degree())
                .map(|k| {
                    comps.remove(&k).unwrap_or_else(|| {
                        let r = if k + shift <= fibers[f].top_degree() { fibers[f].dim(k + shift) } else { 0 };
                        IntMatrix::zeros(r, fibers[e].dim(k))
                    })
                })
                .collect();
            horizontal.insert((e, f), GradedMap::new(shift, full));
        }
        StackComplex::new(base, fibers, horizontal)
    }

    /// Reads a stack file, resolving fiber paths relative to its directory.
    pub fn load(path: &Path) -> Result<StackComplex, StackError> {
        let io = |p: &Path, e: std::io::Error| StackError::Io { path: p.display().to_string(), msg: e.to_string() };
        let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse_with(&text, |rel| std::fs::read_to_string(dir.join(rel)).map_err(|e| e.to_string()))
    }

    /// Stack text referring to fibers as `<stem>.<id>.chain`, plus the fiber
    /// texts under those names.
    pub fn to_text(&self, stem: &str) -> (String, Vec<(String, String)>) {
        let mut out = format!("stack {}\n", self.base.len());
        let mut files = Vec::new();
        for (b, f) in self.base.iter().zip(&self.fibers) {
            let name = format!("{stem}.{}.chain", b.id);
            out.push_str(&format!("cell {} {} {name}\n", b.id, b.dim));
            files.push((name, f.to_string()));
        }
        for (&(e, f), m) in &self.horizontal {
            for (k, c) in m.components().iter().enumerate() {
                if !c.is_zero() {
                    out.push_str(&format!("horizontal {} {} {k}\n{c}", self.base[e].id, self.base[f].id));
                }
            }
        }
        (out, files)
    }

    /// Writes `<dir>/<stem>.stack` and its fiber files.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<(), StackError> {
        let io = |p: &Path, e: std::io::Error| StackError::Io { path: p.display().to_string(), msg: e.to_string() };
        let (text, files) = self.to_text(stem);
        for (name, body) in files {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(|e| io(&p, e))?;
        }
        let p = dir.join(format!("{stem}.stack"));
        std::fs::write(&p, text).map_err(|e| io(&p, e))
    }
}
