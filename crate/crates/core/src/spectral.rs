//! Perron eigenvalue and topological entropy.

use thiserror::Error;

use crate::machine::{AdjacencyMatrix, ChannelMachine};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("matrix is reducible, Perron eigenvalue is not well defined here")]
    NotIrreducible,
    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),
}

/// Dominant eigenvalue of an irreducible nonnegative 0/1 matrix.
///
/// Power iteration runs on the shifted matrix A + I, which is primitive
/// whenever A is irreducible, so the iteration converges even for periodic
/// graphs. The shift is subtracted off the Rayleigh quotient at the end.
pub fn perron_eigenvalue(adj: &AdjacencyMatrix, tol: f64) -> Result<f64, SpectralError> {
    assert!(tol > 0.0, "tolerance must be positive");
    if !adj.is_irreducible() {
        return Err(SpectralError::NotIrreducible);
    }
    let n = adj.dim();
    if n == 1 {
        return Ok(f64::from(adj.entry(0, 0)));
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut prev_rq = f64::NAN;
    for iter in 0..MAX_ITERATIONS {
        // w = (A + I) v
        let mut w = vec![0.0f64; n];
        for (i, wi) in w.iter_mut().enumerate() {
            let mut acc = v[i];
            for j in 0..n {
                if adj.entry(i, j) != 0 {
                    acc += v[j];
                }
            }
            *wi = acc;
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for wi in &mut w {
            *wi /= norm;
        }
        // Rayleigh quotient of the shifted matrix at w
        let mut aw = vec![0.0f64; n];
        for (i, awi) in aw.iter_mut().enumerate() {
            let mut acc = w[i];
            for j in 0..n {
                if adj.entry(i, j) != 0 {
                    acc += w[j];
                }
            }
            *awi = acc;
        }
        let rq: f64 = w.iter().zip(&aw).map(|(x, y)| x * y).sum();
        if iter > 0 && (rq - prev_rq).abs() < tol / 2.0 {
            let residual: f64 = aw
                .iter()
                .zip(&w)
                .map(|(y, x)| (y - rq * x).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual < tol {
                return Ok(rq - 1.0);
            }
        }
        prev_rq = rq;
        v = w;
    }
    Err(SpectralError::NoConvergence(MAX_ITERATIONS))
}

/// Growth rate of admissible noise sequences, as a logarithm base q.
pub fn topological_entropy(machine: &ChannelMachine, tol: f64) -> Result<f64, SpectralError> {
    let lambda = perron_eigenvalue(&machine.adjacency(), tol)?;
    Ok(lambda.ln() / f64::from(machine.q()).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{no_consecutive_ones, noiseless, ChannelKind};

    #[test]
    fn golden_ratio_matrix() {
        let adj = AdjacencyMatrix::from_rows(vec![vec![1, 1], vec![1, 0]]);
        let lambda = perron_eigenvalue(&adj, DEFAULT_TOL).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((lambda - phi).abs() < 1e-9, "lambda = {lambda}");
    }

    #[test]
    fn self_loop_matrix() {
        let adj = AdjacencyMatrix::from_rows(vec![vec![1]]);
        assert_eq!(perron_eigenvalue(&adj, DEFAULT_TOL).unwrap(), 1.0);
    }

    #[test]
    fn periodic_two_cycle_converges() {
        let adj = AdjacencyMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]);
        let lambda = perron_eigenvalue(&adj, DEFAULT_TOL).unwrap();
        assert!((lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reducible_matrix_rejected() {
        let adj = AdjacencyMatrix::from_rows(vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(
            perron_eigenvalue(&adj, DEFAULT_TOL),
            Err(SpectralError::NotIrreducible)
        );
    }

    #[test]
    fn entropy_of_two_state_machine() {
        let m = no_consecutive_ones(ChannelKind::Erasure, 2);
        let h = topological_entropy(&m, DEFAULT_TOL).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((h - phi.log2()).abs() < 1e-9, "h = {h}");
    }

    #[test]
    fn entropy_of_noiseless_machine_is_zero() {
        for q in [2u8, 3, 5] {
            let m = noiseless(ChannelKind::Erasure, q);
            let h = topological_entropy(&m, DEFAULT_TOL).unwrap();
            assert!(h.abs() < 1e-12);
        }
    }
}
