//! Experiment registry: names, the result each experiment exercises, default
//! parameters and the function that runs it.

use crate::config::ExperimentConfig;
use crate::experiments as ex;
use crate::report::Outcome;
use crate::CliError;

pub struct Experiment {
    pub name: &'static str,
    /// The statement the experiment exercises.
    pub anchor: &'static str,
    pub defaults: &'static [(&'static str, &'static str)],
    pub run: fn(&ExperimentConfig) -> Result<Outcome, CliError>,
}

pub const REGISTRY: &[Experiment] = &[
    Experiment {
        name: "stechkin",
        anchor: "Stechkin's inequality ‖W⁰(a)‖_{L^p} ≤ c_p ‖a‖_V",
        defaults: &[],
        run: ex::stechkin,
    },
    Experiment {
        name: "cauchy-norm",
        anchor: "norm of the Cauchy singular integral S on L^p equals cot(π/2p) for p ≥ 2",
        defaults: &[("grid", "32,16384"), ("restarts", "8")],
        run: ex::cauchy_norm,
    },
    Experiment {
        name: "cauchy-pv",
        anchor: "S as principal-value integral and as the multiplier W⁰(-sign)",
        defaults: &[("trials", "20")],
        run: ex::cauchy_pv,
    },
    Experiment {
        name: "isometry-l2",
        anchor: "T_{K_ε} is an isometry on L²",
        defaults: &[("window", "3,6")],
        run: ex::isometry,
    },
    Experiment {
        name: "uniform-bound",
        anchor: "uniform boundedness of the family {T_{K_ε}} on X",
        defaults: &[("grid", "16,2048"), ("window", "2,4"), ("trials", "128")],
        run: ex::uniform_bound,
    },
    Experiment {
        name: "khintchine",
        anchor: "Khintchine domination (Vf)(x) ≤ L ∫ |T_{K_ε}f(x)| dμ(ε)",
        defaults: &[("grid", "16,2048"), ("window", "2,4"), ("trials", "50")],
        run: ex::khintchine,
    },
    Experiment {
        name: "square-function",
        anchor: "boundedness of the square function ‖Vf‖_X ≤ L N ‖f‖_X",
        defaults: &[("grid", "16,2048"), ("window", "2,4"), ("trials", "100")],
        run: ex::square_function,
    },
    Experiment {
        name: "wavelet-roundtrip",
        anchor: "orthonormal wavelets form an unconditional basis of X (window reconstruction)",
        defaults: &[("grid", "32,16384"), ("window", "8,8"), ("trials", "20")],
        run: ex::wavelet_roundtrip,
    },
    Experiment {
        name: "unconditionality",
        anchor: "unconditional convergence of wavelet expansions in X (random sign flips)",
        defaults: &[("window", "8,8"), ("trials", "200")],
        run: ex::unconditionality,
    },
    Experiment {
        name: "kernel-constants",
        anchor: "the kernels K_ε are standard kernels with constants independent of ε",
        defaults: &[],
        run: ex::kernel_constants,
    },
    Experiment {
        name: "condition-d",
        anchor: "standard kernels satisfy Condition (D) with C_D = 8 C₂ and N = 2",
        defaults: &[("trials", "50")],
        run: ex::condition_d,
    },
    Experiment {
        name: "sharp-maximal",
        anchor: "pointwise bound (T_{K_ε}f)^#_s(x₀) ≤ C_s(W) (Mf)(x₀)",
        defaults: &[("trials", "200")],
        run: ex::sharp_maximal,
    },
    Experiment {
        name: "weak-type",
        anchor: "weak type (1,1) of T_{K_ε} with a radial decreasing majorant",
        defaults: &[("trials", "50")],
        run: ex::weak_type,
    },
    Experiment {
        name: "maximal-bounded",
        anchor: "boundedness of the Hardy–Littlewood maximal operator on X and X′",
        defaults: &[("trials", "100"), ("grid", "16,2048")],
        run: ex::maximal_bounded,
    },
    Experiment {
        name: "holder",
        anchor: "Hölder's inequality between X and its associate space X′",
        defaults: &[("trials", "100"), ("grid", "16,2048")],
        run: ex::holder,
    },
    Experiment {
        name: "factorization",
        anchor: "rank-one operators factor as T₁ = a W⁰(c) bI",
        defaults: &[("grid", "16,4096"), ("trials", "20")],
        run: ex::factorization,
    },
    Experiment {
        name: "modulation-conjugation",
        anchor: "s-lim e_h K e_h⁻¹ = 0 for compact K, while e_h (aI) e_h⁻¹ = aI",
        defaults: &[("grid", "16,4096"), ("space", "Lp:2")],
        run: ex::modulation_conjugation,
    },
    Experiment {
        name: "finite-rank",
        anchor: "compact operators are norm limits of finite-rank operators in the wavelet basis",
        defaults: &[("grid", "32,8192"), ("space", "Lp:2"), ("restarts", "4")],
        run: ex::finite_rank,
    },
    Experiment {
        name: "commutator",
        anchor: "open question: do aI and W⁰(σ) commute modulo compact operators?",
        defaults: &[("grid", "16,4096"), ("space", "Lp:2")],
        run: ex::commutator,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name)
}

impl Experiment {
    /// The configuration with this experiment's defaults applied.
    pub fn config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(self.name);
        for (k, v) in self.defaults {
            cfg.set(k, v).expect("registry defaults are valid");
        }
        cfg
    }
}

pub fn listing() -> String {
    let width = REGISTRY.iter().map(|e| e.name.len()).max().unwrap_or(0);
    REGISTRY
        .iter()
        .map(|e| format!("{:width$} → {}\n", e.name, e.anchor))
        .collect()
}
