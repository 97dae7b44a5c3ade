use super::matrix::{ExactMatrix, QMatrix};
use crate::error::{Error, Result};

/// Cochain complex `C^0 -> C^1 -> ... -> C^N` with `d_i: C^i -> C^{i+1}`.
///
/// `d_i` has `dim C^i` columns and `dim C^{i+1}` rows.
#[derive(Clone, Debug)]
pub struct ChainComplex<M = QMatrix> {
    term_dims: Vec<usize>,
    differentials: Vec<M>,
}

impl<M: ExactMatrix> ChainComplex<M> {
    /// Complex whose terms are read off the differential shapes.
    pub fn new(differentials: Vec<M>) -> Result<Self> {
        let Some(first) = differentials.first() else {
            return Err(Error::MalformedInput(
                "complex without differentials needs explicit term dimensions".into(),
            ));
        };
        let mut term_dims = vec![first.cols()];
        term_dims.extend(differentials.iter().map(|d| d.rows()));
        Self::with_terms(term_dims, differentials)
    }

    pub fn with_terms(term_dims: Vec<usize>, differentials: Vec<M>) -> Result<Self> {
        if term_dims.len() != differentials.len() + 1 {
            return Err(Error::MalformedInput(format!(
                "{} terms but {} differentials",
                term_dims.len(),
                differentials.len()
            )));
        }
        for (i, d) in differentials.iter().enumerate() {
            if d.cols() != term_dims[i] || d.rows() != term_dims[i + 1] {
                return Err(Error::MalformedInput(format!(
                    "d{i} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    term_dims[i + 1],
                    term_dims[i]
                )));
            }
        }
        Ok(ChainComplex {
            term_dims,
            differentials,
        })
    }

    pub fn term_dims(&self) -> &[usize] {
        &self.term_dims
    }

    pub fn differentials(&self) -> &[M] {
        &self.differentials
    }

    /// Checks `d_{i+1} * d_i = 0` for every consecutive pair.
    pub fn check_composites(&self) -> Result<()> {
        for (i, pair) in self.differentials.windows(2).enumerate() {
            if !pair[1].product_is_zero(&pair[0]) {
                return Err(Error::ComplexNotExactlyComposable { index: i });
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.term_dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// `h^i = dim ker d_i - rank d_{i-1}`, with `d_{-1} = 0` and `d_N = 0`.
pub fn cohomology_dims<M: ExactMatrix>(c: &ChainComplex<M>) -> Result<Vec<usize>> {
    c.check_composites()?;
    let ranks: Vec<usize> = c.differentials.iter().map(ExactMatrix::rank).collect();
    Ok(c.term_dims
        .iter()
        .enumerate()
        .map(|(i, &dim)| {
            let outgoing = ranks.get(i).copied().unwrap_or(0);
            let incoming = if i == 0 { 0 } else { ranks[i - 1] };
            dim - outgoing - incoming
        })
        .collect())
}
