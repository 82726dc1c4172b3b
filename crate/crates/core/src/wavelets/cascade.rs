//! Values of `φ`, `ψ` and their derivatives at dyadic rationals.
//!
//! Instead of iterating the cascade to a fixed point, the values at the
//! integers are computed first as the eigenvector of `M_ij = √2 h_{2i-j}`
//! (eigenvalue 1 for `φ`, 1/2 for `φ'`). The two-scale relation then gives
//! the values on each finer dyadic mesh exactly, one level at a time.

use nalgebra::{DMatrix, DVector};

use crate::error::{LabError, Result};
use crate::wavelets::filters::{check_qmf, highpass};

/// Default number of dyadic levels.
pub const DEFAULT_LEVELS: usize = 12;

/// Samples on the mesh `m·2^{-levels}`, `m = 0..=(L-1)·2^{levels}`.
#[derive(Debug, Clone)]
pub struct CascadeSamples {
    pub levels: usize,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub dphi: Option<Vec<f64>>,
    pub dpsi: Option<Vec<f64>>,
    /// Residual of the eigenproblem at the integers; the finer levels are exact
    /// consequences of the two-scale relation.
    pub eigen_residual: f64,
}

impl CascadeSamples {
    pub fn step(&self) -> f64 {
        (-(self.levels as f64)).exp2()
    }
}

/// Whether the derivative refinement is meaningful for a filter of this length.
///
/// Haar is discontinuous and db2 is only Hölder continuous with exponent
/// about 0.55, so `ψ'` exists from db3 on.
pub fn has_derivative(filter_len: usize) -> bool {
    filter_len >= 6
}

fn integer_values(h: &[f64], eigenvalue: f64, derivative: bool) -> Result<(Vec<f64>, f64)> {
    let l = h.len();
    if l == 2 {
        // Haar: φ = χ_[0,1), right-continuous at the integers.
        return Ok((vec![1.0, 0.0], 0.0));
    }
    // Unknowns φ(1), ..., φ(L-2); φ vanishes at 0 and L-1 for L ≥ 4.
    let n = l - 2;
    let tap = |i: usize, j: usize| -> f64 {
        let idx = 2 * i as i64 - j as i64;
        if (0..l as i64).contains(&idx) {
            std::f64::consts::SQRT_2 * h[idx as usize]
        } else {
            0.0
        }
    };
    let mut a = DMatrix::<f64>::zeros(n + 1, n);
    for r in 0..n {
        for c in 0..n {
            a[(r, c)] = tap(r + 1, c + 1) - if r == c { eigenvalue } else { 0.0 };
        }
    }
    // Normalization row: Σ φ(m) = 1, or Σ m φ'(m) = -1 for the derivative.
    for c in 0..n {
        a[(n, c)] = if derivative { (c + 1) as f64 } else { 1.0 };
    }
    let mut b = DVector::<f64>::zeros(n + 1);
    b[n] = if derivative { -1.0 } else { 1.0 };
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| LabError::invariant("wavelets", format!("eigen solve failed: {e}")))?;
    let residual = (&a * &x - &b).amax();
    let mut out = vec![0.0; l];
    for i in 0..n {
        out[i + 1] = x[i];
    }
    Ok((out, residual))
}

/// Refines integer values of a refinable function to `levels` dyadic levels.
/// `gain` is `√2` for `φ` and `2√2` for `φ'`.
fn refine(h: &[f64], integers: Vec<f64>, levels: usize, gain: f64) -> Vec<f64> {
    let span = h.len() - 1;
    let mut cur = integers;
    for level in 1..=levels {
        let stride = 1usize << (level - 1);
        let len = span * (1 << level) + 1;
        let mut next = vec![0.0; len];
        for (m, v) in next.iter_mut().enumerate() {
            if m % 2 == 0 {
                *v = cur[m / 2];
                continue;
            }
            // φ(m/2^level) = gain Σ_k h_k φ((m - k 2^{level-1}) / 2^{level-1})
            let mut s = 0.0;
            for (k, hk) in h.iter().enumerate() {
                let off = k * stride;
                if off > m {
                    break;
                }
                if let Some(c) = cur.get(m - off) {
                    s += hk * c;
                }
            }
            *v = gain * s;
        }
        cur = next;
    }
    cur
}

/// `ψ(x) = gain Σ_k g_k φ(2x - k)` on the same mesh as `phi`.
fn wavelet_from(g: &[f64], phi: &[f64], levels: usize, gain: f64) -> Vec<f64> {
    let unit = 1usize << levels;
    (0..phi.len())
        .map(|m| {
            let mut s = 0.0;
            for (k, gk) in g.iter().enumerate() {
                let idx = 2 * m as i64 - (k * unit) as i64;
                if idx >= 0 {
                    if let Some(v) = phi.get(idx as usize) {
                        s += gk * v;
                    }
                }
            }
            gain * s
        })
        .collect()
}

/// Dyadic samples of `φ`, `ψ` and, if `with_derivative`, of `φ'`, `ψ'`.
pub fn cascade_evaluate(filter: &[f64], levels: usize, with_derivative: bool) -> Result<CascadeSamples> {
    check_qmf(filter)?;
    if levels < 8 {
        return Err(LabError::Config(format!("cascade needs at least 8 levels, got {levels}")));
    }
    if levels > 20 {
        return Err(LabError::Config(format!("cascade depth {levels} exceeds 20 levels")));
    }
    if with_derivative && !has_derivative(filter.len()) {
        return Err(LabError::UnsupportedRegularity(format!(
            "a filter of length {} does not generate a C¹ wavelet",
            filter.len()
        )));
    }
    let s2 = std::f64::consts::SQRT_2;
    let g = highpass(filter);
    let (ints, mut residual) = integer_values(filter, 1.0, false)?;
    let phi = refine(filter, ints, levels, s2);
    let psi = wavelet_from(&g, &phi, levels, s2);
    let (dphi, dpsi) = if with_derivative {
        let (dints, r) = integer_values(filter, 0.5, true)?;
        residual = residual.max(r);
        let dphi = refine(filter, dints, levels, 2.0 * s2);
        let dpsi = wavelet_from(&g, &dphi, levels, 2.0 * s2);
        (Some(dphi), Some(dpsi))
    } else {
        (None, None)
    };
    Ok(CascadeSamples {
        levels,
        phi,
        psi,
        dphi,
        dpsi,
        eigen_residual: residual,
    })
}
