use super::{ChainComplex, ChainError};
use crate::exact_linalg::IntMatrix;
use crate::text::{parse_ints, Lines, ParseError};
use std::fmt;

impl ChainComplex {
    /// Parses the chain format: `D`, the `D+1` dimensions (on one or several
    /// lines), then `∂_1 … ∂_D` as triplet matrices.
    pub fn parse(text: &str) -> Result<ChainComplex, ChainError> {
        let mut lines = Lines::new(text);
        let c = Self::read(&mut lines)?;
        if let Some((ln, _)) = lines.next_line() {
            return Err(ParseError::new(ln, "trailing content after chain complex").into());
        }
        Ok(c)
    }

    pub(crate) fn read(lines: &mut Lines<'_>) -> Result<ChainComplex, ChainError> {
        let (_, d) = lines.expect_ints::<usize>(1, "top degree `D`")?;
        let top = d[0];
        let mut dims = Vec::with_capacity(top + 1);
        while dims.len() < top + 1 {
            let (ln, l) = lines.expect_line("cell dimensions")?;
            dims.extend(parse_ints::<usize>(ln, l)?);
            if dims.len() > top + 1 {
                return Err(ParseError::new(ln, format!("expected {} dimensions, found {}", top + 1, dims.len())).into());
            }
        }
        let mut boundaries = Vec::with_capacity(top);
        for j in 1..=top {
            let start = lines.line() + 1;
            let m = IntMatrix::read_triplets(lines)?;
            if m.shape() != (dims[j - 1], dims[j]) {
                return Err(ParseError::new(
                    start,
                    format!("∂_{j} is {}x{}, expected {}x{}", m.rows(), m.cols(), dims[j - 1], dims[j]),
                )
                .into());
            }
            boundaries.push(m);
        }
        ChainComplex::new(dims, boundaries)
    }
}

impl fmt::Display for ChainComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.top_degree())?;
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        writeln!(f, "{}", dims.join(" "))?;
        for (j, b) in self.boundaries.iter().enumerate() {
            writeln!(f, "# d{}", j + 1)?;
            write!(f, "{b}")?;
        }
        Ok(())
    }
}
