//! Maximal functions, kernel oscillation and the Condition (D) ratio.
//!
//! Intervals are unions of grid cells `[x_i - h/2, x_i + h/2)`, so the
//! average of `|f|` over `[x_i, x_j]` is the plain mean of the samples
//! `i..=j`. Every sup below is over a finite family of such intervals and is
//! therefore a lower estimate of the continuum sup.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::grid::{Grid, SampledFunction};
use crate::par;
use crate::spaces::{norm, SpaceSpec};

/// Default radius ratio of an [`IntervalFamily`].
pub const DEFAULT_RATIO: f64 = 1.25;
/// Mesh points per side in [`kernel_oscillation`].
pub const OSCILLATION_MESH: usize = 32;
const OFFSETS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const QUANTILE_CANDIDATES: usize = 128;

/// Geometric radius ladder `r_min q^k ≤ r_max` anchored at `x₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalFamily {
    pub anchor: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub ratio: f64,
}

impl IntervalFamily {
    pub fn new(anchor: f64, r_min: f64, r_max: f64, ratio: f64, grid: &Grid) -> Result<Self> {
        if r_min < grid.spacing() * (1.0 - 1e-12) {
            return Err(LabError::Config(format!(
                "r_min = {r_min} is below the grid spacing {}",
                grid.spacing()
            )));
        }
        if r_max > 2.0 * grid.half_width() * (1.0 + 1e-12) || r_max < r_min {
            return Err(LabError::Config(format!(
                "r_max = {r_max} must lie in [r_min, 2T]"
            )));
        }
        if ratio <= 1.0 {
            return Err(LabError::Config(format!("ladder ratio {ratio} must exceed 1")));
        }
        Ok(IntervalFamily {
            anchor,
            r_min,
            r_max,
            ratio,
        })
    }

    /// Full ladder from one grid spacing up to the window size.
    pub fn spanning(anchor: f64, grid: &Grid) -> Self {
        IntervalFamily {
            anchor,
            r_min: grid.spacing(),
            r_max: 2.0 * grid.half_width(),
            ratio: DEFAULT_RATIO,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut r = self.r_min;
        while r <= self.r_max * (1.0 + 1e-12) {
            out.push(r);
            r *= self.ratio;
        }
        out
    }
}

fn magnitudes(f: &SampledFunction) -> Vec<f64> {
    f.values().iter().map(|v| v.norm()).collect()
}

/// Non-centered maximal function over all grid-aligned intervals.
///
/// For each length `L` the window means are swept with a monotone deque, so
/// the cost is `O(N²)` with no approximation beyond the grid.
pub fn hardy_littlewood_max(f: &SampledFunction) -> SampledFunction {
    let a = magnitudes(f);
    let n = a.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + a[i];
    }
    let mut best = a.clone();
    let mut means = vec![0.0; n];
    let mut dq: VecDeque<usize> = VecDeque::with_capacity(n);
    for len in 2..=n {
        let count = n + 1 - len;
        for i in 0..count {
            means[i] = (prefix[i + len] - prefix[i]) / len as f64;
        }
        // Node m lies in windows i ∈ [m + 1 - len, m] ∩ [0, count).
        dq.clear();
        let mut next = 0;
        for (m, b) in best.iter_mut().enumerate() {
            while next < count && next <= m {
                while dq.back().is_some_and(|&k| means[k] <= means[next]) {
                    dq.pop_back();
                }
                dq.push_back(next);
                next += 1;
            }
            while dq.front().is_some_and(|&k| k + len <= m) {
                dq.pop_front();
            }
            if let Some(&k) = dq.front() {
                if means[k] > *b {
                    *b = means[k];
                }
            }
        }
    }
    SampledFunction::from_parts(
        *f.grid(),
        best.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}

/// `(Mf)(x₀)` over all grid-aligned intervals containing the node nearest `x₀`.
///
/// Dinkelbach iteration: for a trial value `λ` the best interval maximizes
/// `(S_{j+1} - λ(j+1)) - (S_i - λi)`, which separates into a max over `j ≥ m`
/// and a min over `i ≤ m`.
pub fn maximal_at(f: &SampledFunction, x0: f64) -> Result<f64> {
    let m = f
        .grid()
        .nearest_index(x0)
        .ok_or_else(|| LabError::Domain(format!("x0 = {x0} is outside the grid")))?;
    Ok(maximal_at_index(&magnitudes(f), m))
}

pub(crate) fn maximal_at_index(a: &[f64], m: usize) -> f64 {
    let n = a.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + a[i];
    }
    let mut lambda = a[m];
    for _ in 0..100 {
        let (mut hi_v, mut hi_j) = (f64::NEG_INFINITY, m);
        for j in m..n {
            let v = prefix[j + 1] - lambda * (j + 1) as f64;
            if v > hi_v {
                hi_v = v;
                hi_j = j;
            }
        }
        let (mut lo_v, mut lo_i) = (f64::INFINITY, m);
        for i in 0..=m {
            let v = prefix[i] - lambda * i as f64;
            if v < lo_v {
                lo_v = v;
                lo_i = i;
            }
        }
        let next = (prefix[hi_j + 1] - prefix[lo_i]) / (hi_j + 1 - lo_i) as f64;
        if next <= lambda * (1.0 + 1e-15) {
            return lambda.max(next);
        }
        lambda = next;
    }
    lambda
}

/// `inf_c mean |v - c|^s` over real samples.
///
/// For `0 < s < 1` the objective is concave between consecutive data values,
/// so the infimum is attained at a sample. Candidates are 128 quantiles,
/// refined by a local scan in sorted order around the best one.
fn real_sharp_modular(v: &mut [f64], s: f64) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 || v[0] == v[n - 1] {
        return 0.0;
    }
    let objective = |c: f64| v.iter().map(|x| (x - c).abs().powf(s)).sum::<f64>() / n as f64;
    if n <= QUANTILE_CANDIDATES {
        return v.iter().map(|&c| objective(c)).fold(f64::INFINITY, f64::min);
    }
    let stride = (n - 1) as f64 / (QUANTILE_CANDIDATES - 1) as f64;
    let mut best = (f64::INFINITY, 0usize);
    for q in 0..QUANTILE_CANDIDATES {
        let idx = (q as f64 * stride).round() as usize;
        let val = objective(v[idx]);
        if val < best.0 {
            best = (val, idx);
        }
    }
    let reach = stride.ceil() as usize + 1;
    let lo = best.1.saturating_sub(reach);
    let hi = (best.1 + reach).min(n - 1);
    let mut step = 1usize.max((hi - lo) / 64);
    let mut centre = best.1;
    while step >= 1 {
        let a = centre.saturating_sub(step * 4).max(lo);
        let b = (centre + step * 4).min(hi);
        let mut idx = a;
        while idx <= b {
            let val = objective(v[idx]);
            if val < best.0 {
                best = (val, idx);
            }
            idx += step;
        }
        centre = best.1;
        if step == 1 {
            break;
        }
        step /= 2;
    }
    best.0
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

/// Coordinate golden-section search for complex samples, seeded at the
/// coordinatewise medians; the result never exceeds the value at the seed.
fn complex_sharp_modular(v: &[Complex64], s: f64) -> f64 {
    let n = v.len() as f64;
    let objective = |c: Complex64| v.iter().map(|x| (x - c).norm().powf(s)).sum::<f64>() / n;
    let mut re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let mut im: Vec<f64> = v.iter().map(|z| z.im).collect();
    let (re_lo, re_hi) = re.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, x| (a.0.min(*x), a.1.max(*x)));
    let (im_lo, im_hi) = im.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, x| (a.0.min(*x), a.1.max(*x)));
    let mut c = Complex64::new(median(&mut re), median(&mut im));
    let mut best = objective(c);
    for _ in 0..3 {
        let (x, fx) = golden(|t| objective(Complex64::new(t, c.im)), re_lo, re_hi, 40);
        if fx < best {
            best = fx;
            c.re = x;
        }
        let (y, fy) = golden(|t| objective(Complex64::new(c.re, t)), im_lo, im_hi, 40);
        if fy < best {
            best = fy;
            c.im = y;
        }
    }
    best
}

/// `(inf_c mean_{i..=j} |f - c|^s)^{1/s}`.
fn interval_oscillation(values: &[Complex64], i: usize, j: usize, s: f64, real: bool) -> f64 {
    let slice = &values[i..=j];
    let m = if real {
        let mut v: Vec<f64> = slice.iter().map(|z| z.re).collect();
        real_sharp_modular(&mut v, s)
    } else {
        complex_sharp_modular(slice, s)
    };
    m.powf(1.0 / s)
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(LabError::Config(format!("sharp maximal exponent s = {s} must lie in (0, 1)")))
    }
}

fn is_real(f: &SampledFunction) -> bool {
    f.values().iter().all(|z| z.im == 0.0)
}

/// Index ranges of the intervals `Q ∋ x_m` used for the sharp maximal function:
/// lengths `2r` from the ladder, with `x_m` at offsets 0, ¼, ½, ¾, 1 of `Q`.
fn noncentered_ranges(grid: &Grid, m: usize, radii: &[f64]) -> Vec<(usize, usize)> {
    let h = grid.spacing();
    let n = grid.count();
    let mut out = Vec::new();
    for &r in radii {
        let len = ((2.0 * r / h).round() as usize).max(1);
        for off in OFFSETS {
            let left = (off * (len - 1) as f64).round() as usize;
            if left > m {
                continue;
            }
            let i = m - left;
            let j = i + len - 1;
            if j < n {
                out.push((i, j));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn centered_ranges(grid: &Grid, m: usize, radii: &[f64]) -> Vec<(usize, usize)> {
    let h = grid.spacing();
    let n = grid.count();
    let mut out: Vec<(usize, usize)> = radii
        .iter()
        .map(|&r| {
            let half = ((r / h).round() as usize).max(1);
            (m.saturating_sub(half), (m + half).min(n - 1))
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `f_s^#(x₀)` over the intervals of `family`.
pub fn local_sharp_max_at(f: &SampledFunction, s: f64, family: &IntervalFamily) -> Result<f64> {
    check_s(s)?;
    let m = f
        .grid()
        .nearest_index(family.anchor)
        .ok_or_else(|| LabError::Domain(format!("x0 = {} is outside the grid", family.anchor)))?;
    let real = is_real(f);
    let ranges = noncentered_ranges(f.grid(), m, &family.radii());
    Ok(ranges
        .iter()
        .map(|&(i, j)| interval_oscillation(f.values(), i, j, s, real))
        .fold(0.0, f64::max))
}

/// Centered variant: sup over `I(x₀, r)` only.
pub fn local_sharp_max_centered_at(
    f: &SampledFunction,
    s: f64,
    family: &IntervalFamily,
) -> Result<f64> {
    check_s(s)?;
    let m = f
        .grid()
        .nearest_index(family.anchor)
        .ok_or_else(|| LabError::Domain(format!("x0 = {} is outside the grid", family.anchor)))?;
    let real = is_real(f);
    let ranges = centered_ranges(f.grid(), m, &family.radii());
    Ok(ranges
        .iter()
        .map(|&(i, j)| interval_oscillation(f.values(), i, j, s, real))
        .fold(0.0, f64::max))
}

/// `f_s^#` at every node, with the full ladder at each node.
pub fn local_sharp_max(f: &SampledFunction, s: f64) -> Result<SampledFunction> {
    check_s(s)?;
    let grid = *f.grid();
    let values = par::map_indexed(grid.count(), |m| {
        let fam = IntervalFamily::spanning(grid.node(m), &grid);
        local_sharp_max_at(f, s, &fam).map(|v| Complex64::new(v, 0.0))
    });
    let values: Result<Vec<_>> = values.into_iter().collect();
    Ok(SampledFunction::from_parts(grid, values?))
}

/// A kernel `K(x, y)` defined off the diagonal.
pub trait Kernel: Sync {
    fn eval(&self, x: f64, y: f64) -> Complex64;

    /// `K(z, ·)` at every grid node.
    fn row(&self, z: f64, grid: &Grid) -> Vec<Complex64> {
        grid.nodes().map(|y| self.eval(z, y)).collect()
    }
}

impl<F: Fn(f64, f64) -> Complex64 + Sync> Kernel for F {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        self(x, y)
    }
}

fn midpoints(a: f64, b: f64) -> Vec<f64> {
    let n = OSCILLATION_MESH;
    (0..n).map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64).collect()
}

/// `(D_I K)(y) = |I|⁻² ∬_{I×I} |K(z,y) - K(x,y)| dx dz` on a midpoint mesh.
pub fn kernel_oscillation(k: &dyn Kernel, interval: (f64, f64), y: f64) -> Result<f64> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(LabError::Domain(format!("empty interval ({a}, {b})")));
    }
    if y >= a && y <= b {
        return Err(LabError::Domain(format!("y = {y} lies in the closed interval [{a}, {b}]")));
    }
    let vals: Vec<Complex64> = midpoints(a, b).into_iter().map(|z| k.eval(z, y)).collect();
    Ok(pair_mean(&vals))
}

fn pair_mean(vals: &[Complex64]) -> f64 {
    let n = vals.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += (vals[i] - vals[j]).norm();
        }
    }
    2.0 * s / (n * n) as f64
}

/// `sup_r ∫_{|y-x₀|>Nr} (D_I K)(y) |f(y)| dy / (Mf)(x₀)` over the ladder of `family`.
pub fn condition_d_ratio(
    k: &dyn Kernel,
    f: &SampledFunction,
    family: &IntervalFamily,
    cutoff: f64,
) -> Result<f64> {
    let grid = *f.grid();
    let x0 = family.anchor;
    let mf = maximal_at(f, x0)?;
    if mf == 0.0 {
        return Err(LabError::Undefined("(Mf)(x0) = 0".into()));
    }
    let h = grid.spacing();
    let abs_f = magnitudes(f);
    let support: Vec<usize> = (0..grid.count()).filter(|&n| abs_f[n] > 0.0).collect();
    let mut best: f64 = 0.0;
    for r in family.radii() {
        let far: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&n| (grid.node(n) - x0).abs() > cutoff * r)
            .collect();
        if far.is_empty() {
            continue;
        }
        let rows: Vec<Vec<Complex64>> = midpoints(x0 - r, x0 + r)
            .into_iter()
            .map(|z| k.row(z, &grid))
            .collect();
        let terms = par::map_indexed(far.len(), |t| {
            let n = far[t];
            let vals: Vec<Complex64> = rows.iter().map(|row| row[n]).collect();
            pair_mean(&vals) * abs_f[n]
        });
        best = best.max(terms.iter().sum::<f64>() * h);
    }
    Ok(best / mf)
}

/// `‖Mf‖_X / ‖f‖_X`, the empirical maximal bound on one input.
pub fn maximal_norm_ratio(f: &SampledFunction, spec: &SpaceSpec) -> Result<f64> {
    let nf = norm(f, spec)?.value;
    if nf == 0.0 {
        return Err(LabError::Undefined("‖f‖ = 0".into()));
    }
    Ok(norm(&hardy_littlewood_max(f), spec)?.value / nf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_max(a: &[f64], m: usize) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..=m {
            for j in m..a.len() {
                let s: f64 = a[i..=j].iter().sum();
                best = best.max(s / (j + 1 - i) as f64);
            }
        }
        best
    }

    #[test]
    fn maximal_matches_brute_force() {
        let g = Grid::new(2.0, 64).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| (3.0 * x).sin() + 0.3 * x);
        let mf = hardy_littlewood_max(&f);
        let a: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
        for m in 0..64 {
            let b = brute_max(&a, m);
            assert!((mf.values()[m].re - b).abs() < 1e-12);
            assert!((maximal_at_index(&a, m) - b).abs() < 1e-12);
            assert!(mf.values()[m].re >= a[m]);
        }
    }

    #[test]
    fn constants_have_flat_maximal_and_zero_sharp() {
        let g = Grid::new(2.0, 64).unwrap();
        let f = SampledFunction::from_fn(g, |_| Complex64::new(0.0, -2.0));
        assert!(hardy_littlewood_max(&f).values().iter().all(|v| (v.re - 2.0).abs() < 1e-12));
        let fam = IntervalFamily::spanning(0.3, &g);
        assert_eq!(local_sharp_max_at(&f, 0.5, &fam).unwrap(), 0.0);
        assert!(local_sharp_max_at(&f, 1.0, &fam).is_err());
    }

    #[test]
    fn real_inf_is_attained_at_samples() {
        let mut v: Vec<f64> = (0..300).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let exact = v
            .iter()
            .map(|&c| v.iter().map(|x| (x - c).abs().sqrt()).sum::<f64>() / 300.0)
            .fold(f64::INFINITY, f64::min);
        let got = real_sharp_modular(&mut v, 0.5);
        assert!(got >= exact - 1e-12 && got <= exact * (1.0 + 1e-3));
    }

    #[test]
    fn oscillation_of_linear_kernel() {
        let k = |x: f64, _y: f64| Complex64::new(x, 0.0);
        // E|z - x| over a square of side 2 is 2/3.
        let v = kernel_oscillation(&k, (-1.0, 1.0), 3.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 2e-3, "{v}");
        assert!(kernel_oscillation(&k, (-1.0, 1.0), 0.5).is_err());
        let c = |_x: f64, y: f64| Complex64::new(y, 0.0);
        assert_eq!(kernel_oscillation(&c, (-1.0, 1.0), 3.0).unwrap(), 0.0);
    }
}
