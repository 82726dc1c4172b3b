//! Finite dyadic systems `ψ_{j,k}(x) = 2^{j/2} ψ(2^j x - k)` sampled on a grid.
//!
//! A [`Window`] selects scales and translates. Elements are kept only when
//! their support lies inside `[-T, T]` and the grid resolves them, i.e.
//! `2^j h ≤ 1/RESOLUTION`; everything else is either zero on the grid or
//! aliased. An optional scaling layer `φ_{j0,k}` turns the window into a
//! multiresolution basis that also captures the coarse content of a function.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::grid::{Grid, SampledFunction};
use crate::par;
use crate::wavelets::Wavelet;

/// Minimum number of grid samples per unit of the wavelet's own argument.
pub const RESOLUTION: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Scaling,
    Wavelet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub j_min: i32,
    pub j_max: i32,
    /// Translate bounds; `None` keeps every translate that fits in the grid.
    pub k_bounds: Option<(i64, i64)>,
    /// Level `j0` of an additional `φ_{j0,k}` layer, all translates in the grid.
    pub scaling: Option<i32>,
}

impl Window {
    /// `j ∈ [-J, J]`, `k ∈ [-K, K]`, wavelets only.
    pub fn symmetric(j: u32, k: u32) -> Self {
        Window {
            j_min: -(j as i32),
            j_max: j as i32,
            k_bounds: Some((-(k as i64), k as i64)),
            scaling: None,
        }
    }

    /// `φ_{j0,·}` plus `ψ_{j,·}` for `j0 ≤ j ≤ j_max`, all translates.
    pub fn mra(j0: i32, j_max: i32) -> Self {
        Window {
            j_min: j0,
            j_max,
            k_bounds: None,
            scaling: Some(j0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.j_min > self.j_max {
            return Err(LabError::Config(format!(
                "empty scale range [{}, {}]",
                self.j_min, self.j_max
            )));
        }
        if let Some((a, b)) = self.k_bounds {
            if a > b {
                return Err(LabError::Config(format!("empty translate range [{a}, {b}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Element {
    pub kind: ElementKind,
    pub j: i32,
    pub k: i64,
    /// First grid index of the support.
    pub start: usize,
    pub values: Vec<f64>,
}

impl Element {
    pub fn end(&self) -> usize {
        self.start + self.values.len()
    }

    /// `h Σ f_n ψ(x_n)`, the quadrature of `⟨f, ψ⟩`.
    pub fn pair(&self, f: &[Complex64], h: f64) -> Complex64 {
        f[self.start..self.end()]
            .iter()
            .zip(&self.values)
            .map(|(a, b)| a * b)
            .sum::<Complex64>()
            * h
    }

    pub fn overlaps(&self, other: &Element) -> bool {
        self.start < other.end() && other.start < self.end()
    }

    pub fn dot(&self, other: &Element, h: f64) -> f64 {
        let lo = self.start.max(other.start);
        let hi = self.end().min(other.end());
        if lo >= hi {
            return 0.0;
        }
        (lo..hi)
            .map(|n| self.values[n - self.start] * other.values[n - other.start])
            .sum::<f64>()
            * h
    }

    pub fn to_sampled(&self, grid: Grid) -> SampledFunction {
        let mut v = vec![Complex64::new(0.0, 0.0); grid.count()];
        for (i, x) in self.values.iter().enumerate() {
            v[self.start + i] = Complex64::new(*x, 0.0);
        }
        SampledFunction::from_parts(grid, v)
    }
}

fn sample(w: &Wavelet, kind: ElementKind, j: i32, k: i64, grid: &Grid) -> Option<(usize, Vec<f64>)> {
    let scale = (j as f64).exp2();
    let a = k as f64 / scale;
    let b = (k as f64 + w.support_len()) / scale;
    let h = grid.spacing();
    let t = grid.half_width();
    let first = ((a + t) / h).ceil().max(0.0) as usize;
    let last = (((b + t) / h).floor() as i64).min(grid.count() as i64 - 1);
    if last < first as i64 {
        return None;
    }
    let amp = scale.sqrt();
    let values: Vec<f64> = (first..=last as usize)
        .map(|n| {
            let u = scale * grid.node(n) - k as f64;
            amp * match kind {
                ElementKind::Wavelet => w.psi(u),
                ElementKind::Scaling => w.phi(u),
            }
        })
        .collect();
    Some((first, values))
}

/// `ψ_{j,k}` sampled on `grid`; errors if its support misses the grid entirely.
pub fn dyadic_element(w: &Wavelet, j: i32, k: i64, grid: &Grid) -> Result<SampledFunction> {
    let (start, values) = sample(w, ElementKind::Wavelet, j, k, grid).ok_or_else(|| {
        LabError::Domain(format!("support of psi_({j},{k}) lies outside the grid"))
    })?;
    Ok(Element {
        kind: ElementKind::Wavelet,
        j,
        k,
        start,
        values,
    }
    .to_sampled(*grid))
}

type Key = (ElementKind, i32, i64);

#[derive(Debug, Clone)]
pub struct DyadicSystem {
    grid: Grid,
    wavelet: Wavelet,
    window: Window,
    elements: Vec<Element>,
    index: HashMap<Key, usize>,
}

impl DyadicSystem {
    pub fn new(w: &Wavelet, window: Window, grid: &Grid) -> Result<Self> {
        window.validate()?;
        let h = grid.spacing();
        let t = grid.half_width();
        let len = w.support_len();
        let mut keys: Vec<Key> = Vec::new();
        let mut push_level = |kind: ElementKind, j: i32, bounds: Option<(i64, i64)>| {
            let scale = (j as f64).exp2();
            if scale * h * RESOLUTION > 1.0 + 1e-12 {
                return;
            }
            // Support [k, k + len] / 2^j inside [-T, T].
            let mut lo = (-t * scale).ceil() as i64;
            let mut hi = (t * scale - len).floor() as i64;
            if let Some((a, b)) = bounds {
                lo = lo.max(a);
                hi = hi.min(b);
            }
            for k in lo..=hi {
                keys.push((kind, j, k));
            }
        };
        if let Some(j0) = window.scaling {
            push_level(ElementKind::Scaling, j0, None);
        }
        for j in window.j_min..=window.j_max {
            push_level(ElementKind::Wavelet, j, window.k_bounds);
        }
        let centre = |j: i32, k: i64| ((k as f64 + 0.5 * len) / (j as f64).exp2()).abs();
        keys.sort_by(|a, b| {
            (a.0, a.1.abs())
                .cmp(&(b.0, b.1.abs()))
                .then(centre(a.1, a.2).total_cmp(&centre(b.1, b.2)))
                .then((a.1, a.2).cmp(&(b.1, b.2)))
        });
        let elements: Vec<Element> = par::map_indexed(keys.len(), |i| {
            let (kind, j, k) = keys[i];
            let (start, values) = sample(w, kind, j, k, grid).expect("support inside grid");
            Element {
                kind,
                j,
                k,
                start,
                values,
            }
        });
        let index = keys.iter().enumerate().map(|(i, key)| (*key, i)).collect();
        Ok(DyadicSystem {
            grid: *grid,
            wavelet: w.clone(),
            window,
            elements,
            index,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn wavelet(&self) -> &Wavelet {
        &self.wavelet
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, kind: ElementKind, j: i32, k: i64) -> Option<usize> {
        self.index.get(&(kind, j, k)).copied()
    }

    /// Quadrature coefficients `⟨f, e_i⟩` in element order.
    pub fn coefficients(&self, f: &[Complex64]) -> Vec<Complex64> {
        let h = self.grid.spacing();
        par::map_indexed(self.elements.len(), |i| self.elements[i].pair(f, h))
    }

    /// `Σ c_i e_i` on the grid.
    pub fn synthesize(&self, coefs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.count()];
        for (e, c) in self.elements.iter().zip(coefs) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, v) in out[e.start..e.end()].iter_mut().zip(&e.values) {
                *o += c * v;
            }
        }
        out
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> (f64, f64) {
        let h = self.grid.spacing();
        let rows = par::map_indexed(self.elements.len(), |i| {
            let ei = &self.elements[i];
            let mut diag: f64 = 0.0;
            let mut off: f64 = 0.0;
            for (m, em) in self.elements.iter().enumerate().skip(i) {
                if !ei.overlaps(em) {
                    continue;
                }
                let d = ei.dot(em, h);
                if m == i {
                    diag = (d - 1.0).abs();
                } else {
                    off = off.max(d.abs());
                }
            }
            (diag, off)
        });
        rows.into_iter()
            .fold((0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
    }

    pub fn table(&self, entries: Vec<Complex64>) -> Result<CoefficientTable> {
        if entries.len() != self.elements.len() {
            return Err(LabError::Config(format!(
                "table has {} entries for {} elements",
                entries.len(),
                self.elements.len()
            )));
        }
        Ok(CoefficientTable {
            window: self.window,
            keys: self.elements.iter().map(|e| (e.kind, e.j, e.k)).collect(),
            entries,
        })
    }
}

/// Wavelet coefficients indexed by `(kind, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub window: Window,
    pub keys: Vec<(ElementKind, i32, i64)>,
    pub entries: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn empty(window: Window) -> Self {
        CoefficientTable {
            window,
            keys: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn get(&self, j: i32, k: i64) -> Option<Complex64> {
        self.keys
            .iter()
            .position(|&(kind, a, b)| kind == ElementKind::Wavelet && a == j && b == k)
            .map(|i| self.entries[i])
    }

    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        CoefficientTable {
            window: self.window,
            keys: self.keys.clone(),
            entries: self.entries.iter().enumerate().map(|(i, c)| f(i, *c)).collect(),
        }
    }
}

/// `⟨f, ψ_{j,k}⟩` for `j ∈ [-J, J]`, `k ∈ [-K, K]` (clipped to the grid).
pub fn wavelet_coefficients(f: &SampledFunction, w: &Wavelet, j: u32, k: u32) -> Result<CoefficientTable> {
    let sys = DyadicSystem::new(w, Window::symmetric(j, k), f.grid())?;
    sys.table(sys.coefficients(f.values()))
}

/// `Σ entry·e_{j,k}`; entries whose element does not fit on `grid` are an error.
pub fn reconstruct(table: &CoefficientTable, w: &Wavelet, grid: &Grid) -> Result<SampledFunction> {
    if table.keys.is_empty() {
        return Ok(SampledFunction::zeros(*grid));
    }
    let sys = DyadicSystem::new(w, table.window, grid)?;
    let mut coefs = vec![Complex64::new(0.0, 0.0); sys.len()];
    for (key, c) in table.keys.iter().zip(&table.entries) {
        let i = sys.position(key.0, key.1, key.2).ok_or_else(|| {
            LabError::Domain(format!("element {key:?} is not resolved on this grid"))
        })?;
        coefs[i] = *c;
    }
    Ok(SampledFunction::from_parts(*grid, sys.synthesize(&coefs)))
}
