//! Shared test oracles, written independently of the library's algorithms:
//! exhaustive simple-cycle enumeration and a characteristic-polynomial
//! eigenvalue solver.

#![allow(dead_code)]

use num::rational::Ratio;

use fschan::ChannelMachine;

/// Largest real root of a monic polynomial given by its non-leading
/// coefficients (constant term first), by a downward scan for the sign
/// change followed by bisection.
pub fn largest_real_root(coeffs: &[f64], hi0: f64) -> f64 {
    let p = |x: f64| -> f64 {
        let mut v = 1.0;
        for &c in coeffs.iter().rev() {
            v = v * x + c;
        }
        v
    };
    let mut hi = hi0;
    while p(hi) <= 0.0 {
        hi += 1.0;
    }
    let mut lo = hi;
    while p(lo) > 0.0 {
        lo -= 1e-3;
        assert!(lo > -(hi0 + 1.0), "no real root found");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Coefficients of det(xI - A) from the constant term up, leading 1
/// omitted, by the Faddeev-LeVerrier recursion in floating point.
pub fn characteristic_polynomial(rows: &[Vec<u8>]) -> Vec<f64> {
    let n = rows.len();
    let a: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| f64::from(v)).collect())
        .collect();
    let mul = |x: &[Vec<f64>], y: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let mut z = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    z[i][j] += x[i][k] * y[k][j];
                }
            }
        }
        z
    };
    let mut m = vec![vec![0.0; n]; n];
    let mut coeffs = vec![0.0; n];
    let mut c = 1.0;
    for k in 1..=n {
        // M_k = A (M_{k-1} + c_{n-k+1} I)
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += c;
        }
        m = mul(&a, &m);
        let trace: f64 = (0..n).map(|i| m[i][i]).sum();
        c = -trace / k as f64;
        coeffs[n - k] = c;
    }
    coeffs
}

/// Spectral radius of a small nonnegative integer matrix as the largest
/// real root of its characteristic polynomial.
pub fn perron_oracle(rows: &[Vec<u8>]) -> f64 {
    let hi = rows
        .iter()
        .map(|r| r.iter().map(|&v| f64::from(v)).sum::<f64>())
        .fold(0.0, f64::max);
    largest_real_root(&characteristic_polynomial(rows), hi + 1.0)
}

/// Maximum error-edge density over all simple cycles, by depth-first
/// enumeration anchored at each cycle's smallest state.
pub fn exhaustive_max_cycle_ratio(m: &ChannelMachine) -> Ratio<i64> {
    let n = m.num_states();
    let mut best: Option<Ratio<i64>> = None;
    let mut on_path = vec![false; n];
    for anchor in 0..n {
        dfs_cycles(m, anchor, anchor, 0, 0, &mut on_path, &mut best);
    }
    best.expect("strongly connected machines contain a cycle")
}

fn dfs_cycles(
    m: &ChannelMachine,
    anchor: usize,
    v: usize,
    errors: i64,
    length: i64,
    on_path: &mut [bool],
    best: &mut Option<Ratio<i64>>,
) {
    on_path[v] = true;
    for e in m.outgoing(v) {
        let w = i64::from(e.is_error());
        if e.to == anchor {
            let r = Ratio::new(errors + w, length + 1);
            if best.map_or(true, |b| r > b) {
                *best = Some(r);
            }
        } else if e.to > anchor && !on_path[e.to] {
            dfs_cycles(m, anchor, e.to, errors + w, length + 1, on_path, best);
        }
    }
    on_path[v] = false;
}
