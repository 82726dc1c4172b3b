//! Three interactive views over `lab-core`, exported to JavaScript.
//!
//! Each `*_view` function is plain Rust and returns owned sample vectors; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use lab_core::grid::{Grid, SampledFunction};
use lab_core::maximal::{hardy_littlewood_max, local_sharp_max_at, IntervalFamily};
use lab_core::multipliers::{apply_w0, named_symbol, stechkin_check};
use lab_core::spaces::NormEstimateOptions;
use lab_core::wavelets::{majorant_violations, Wavelet};
use lab_core::{Complex64, Result, SpaceSpec};
use wasm_bindgen::prelude::*;

/// Half-width of the demo window.
pub const HALF_WIDTH: f64 = 8.0;
const MAX_NODES: usize = 4096;

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct WaveletProfile {
    x: Vec<f64>,
    psi: Vec<f64>,
    envelope: Vec<f64>,
    c: f64,
    delta: f64,
    violations: usize,
}

#[wasm_bindgen]
impl WaveletProfile {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn psi(&self) -> Vec<f64> {
        self.psi.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn envelope(&self) -> Vec<f64> {
        self.envelope.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn c(&self) -> f64 {
        self.c
    }
    #[wasm_bindgen(getter)]
    pub fn delta(&self) -> f64 {
        self.delta
    }
    #[wasm_bindgen(getter)]
    pub fn violations(&self) -> usize {
        self.violations
    }
}

/// `ψ` on its support with the fitted envelope `C e^{-δx}`.
pub fn wavelet_view(name: &str, points: usize) -> Result<WaveletProfile> {
    let w = Wavelet::new(name)?;
    let m = w.majorant();
    let points = points.clamp(2, MAX_NODES);
    let len = w.support_len();
    let x: Vec<f64> = (0..points).map(|i| len * i as f64 / (points - 1) as f64).collect();
    Ok(WaveletProfile {
        psi: x.iter().map(|&t| w.psi(t)).collect(),
        envelope: x.iter().map(|&t| m.eval(t)).collect(),
        x,
        c: m.c,
        delta: m.delta,
        violations: majorant_violations(&w, m),
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct MultiplierView {
    x: Vec<f64>,
    input: Vec<f64>,
    output_re: Vec<f64>,
    output_im: Vec<f64>,
    lower: f64,
    bound: f64,
    v_norm: f64,
}

#[wasm_bindgen]
impl MultiplierView {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn input(&self) -> Vec<f64> {
        self.input.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn output_re(&self) -> Vec<f64> {
        self.output_re.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn output_im(&self) -> Vec<f64> {
        self.output_im.clone()
    }
    /// Power-iteration lower bound for the operator norm on `L^p`.
    #[wasm_bindgen(getter)]
    pub fn lower(&self) -> f64 {
        self.lower
    }
    /// `c_p ‖a‖_V`.
    #[wasm_bindgen(getter)]
    pub fn bound(&self) -> f64 {
        self.bound
    }
    #[wasm_bindgen(getter)]
    pub fn v_norm(&self) -> f64 {
        self.v_norm
    }
}

fn demo_grid(count: usize) -> Result<Grid> {
    Grid::new(HALF_WIDTH, count.clamp(64, MAX_NODES).next_power_of_two())
}

/// `W⁰(a)` applied to the indicator of `[-1, 1]`, plus the norm check on `L^p`.
pub fn multiplier_view(symbol: &str, p: f64, count: usize) -> Result<MultiplierView> {
    let grid = demo_grid(count)?;
    let spec = SpaceSpec::lebesgue(p)?;
    let a = named_symbol(symbol, &grid)?;
    let f = SampledFunction::from_real_fn(grid, |x| if x.abs() <= 1.0 { 1.0 } else { 0.0 });
    let g = apply_w0(&a, &f)?;
    let opts = NormEstimateOptions {
        max_iterations: 120,
        ..NormEstimateOptions::with_restarts(2, 1)
    };
    let report = stechkin_check(&a, &spec, &opts)?;
    Ok(MultiplierView {
        x: grid.nodes().collect(),
        input: f.values().iter().map(|v| v.re).collect(),
        output_re: g.values().iter().map(|v| v.re).collect(),
        output_im: g.values().iter().map(|v| v.im).collect(),
        lower: report.lhs,
        bound: report.rhs.unwrap_or(f64::NAN),
        v_norm: report.v_norm,
    })
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct MaximalView {
    x: Vec<f64>,
    f: Vec<f64>,
    maximal: Vec<f64>,
    sharp_x: Vec<f64>,
    sharp: Vec<f64>,
}

#[wasm_bindgen]
impl MaximalView {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn f(&self) -> Vec<f64> {
        self.f.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn maximal(&self) -> Vec<f64> {
        self.maximal.clone()
    }
    /// Nodes where `f_s^#` is evaluated, a subsample of `x`.
    #[wasm_bindgen(getter)]
    pub fn sharp_x(&self) -> Vec<f64> {
        self.sharp_x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn sharp(&self) -> Vec<f64> {
        self.sharp.clone()
    }
}

/// Number of nodes carrying `f_s^#`; each one scans the full radius ladder.
pub const SHARP_POINTS: usize = 96;

/// Shapes offered by [`maximal_view`].
pub const SHAPES: [&str; 3] = ["step", "log", "packet"];

fn shape(name: &str, x: f64) -> Option<f64> {
    Some(match name {
        "step" => {
            if (-2.0..1.0).contains(&x) {
                1.0
            } else {
                0.0
            }
        }
        "log" => (-x.abs().max(1e-3).ln()).max(0.0),
        "packet" => (-x * x / 2.0).exp() * (4.0 * x).cos(),
        _ => return None,
    })
}

/// `|f|` and `Mf` on the grid, `f_s^#` on [`SHARP_POINTS`] nodes, for one of [`SHAPES`].
pub fn maximal_view(name: &str, s: f64, count: usize) -> Result<MaximalView> {
    if shape(name, 0.0).is_none() {
        return Err(lab_core::LabError::Config(format!(
            "unknown shape {name:?}; expected one of {}",
            SHAPES.join(", ")
        )));
    }
    let grid = demo_grid(count)?;
    let f = SampledFunction::from_fn(grid, |x| Complex64::new(shape(name, x).unwrap_or(0.0), 0.0));
    let m = hardy_littlewood_max(&f);
    let stride = (grid.count() / SHARP_POINTS).max(1);
    let sharp_x: Vec<f64> = grid.nodes().step_by(stride).collect();
    let sharp = sharp_x
        .iter()
        .map(|&x| local_sharp_max_at(&f, s, &IntervalFamily::spanning(x, &grid)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(MaximalView {
        x: grid.nodes().collect(),
        f: f.abs(),
        maximal: m.values().iter().map(|v| v.re).collect(),
        sharp_x,
        sharp,
    })
}

fn js(e: lab_core::LabError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn wavelet_profile(name: &str, points: usize) -> std::result::Result<WaveletProfile, JsError> {
    wavelet_view(name, points).map_err(js)
}

#[wasm_bindgen]
pub fn multiplier(symbol: &str, p: f64, count: usize) -> std::result::Result<MultiplierView, JsError> {
    multiplier_view(symbol, p, count).map_err(js)
}

#[wasm_bindgen]
pub fn maximal(shape: &str, s: f64, count: usize) -> std::result::Result<MaximalView, JsError> {
    maximal_view(shape, s, count).map_err(js)
}
