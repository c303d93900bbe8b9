//! The nonlinearity `f = F'`, problem parameters, and indicial roots.
//!
//! Everything downstream consumes a [`PotentialSpec`]: the double-well
//! derivative `f`, its antiderivative `F` normalized by `F(±1) = 0`, the
//! derivative `f'`, and the two constants that control the linear theory,
//! `λ = -f'(0)` and the Lipschitz constant `L = sup_{[-1,1]} |f'|`.
//!
//! The sign convention for the cubic family is `f(u) = k·u(u² - 1)`, so that
//! `f'(0) = -k < 0` and `F(u) = (k/4)(u² - 1)²`. This is the convention under
//! which the closed-form connection `u(x) = x^a / (1 + x^a)` of the parabolic
//! reduction actually solves the equation (see
//! [`crate::parabolic::explicit_solution_residual`]); the opposite sign
//! `k·u(1 - u²)` leaves an O(1) residual and a positive `f'(0)`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Evaluator type for custom potentials.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cubic potential requires k > 0, got {0}")]
    NonPositiveK(f64),
    #[error("dimension must satisfy n >= 2, got {0}")]
    BadDimension(u32),
    #[error("complex indicial roots: discriminant {discriminant} < 0 for n = {n}, mu = {mu}")]
    ComplexRoots { n: u32, mu: f64, discriminant: f64 },
    #[error("need at least {min} samples/grid points, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("potential table: {0}")]
    BadTable(String),
}

/// How the potential is evaluated.
#[derive(Clone)]
pub enum PotentialKind {
    /// `f(u) = k·u(u² - 1)`, `F(u) = (k/4)(u² - 1)²`.
    Cubic { k: f64 },
    /// Arbitrary user-supplied evaluators (analytic or spline-backed).
    Custom {
        f: ScalarFn,
        big_f: ScalarFn,
        fprime: ScalarFn,
    },
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialKind::Cubic { k } => write!(fm, "Cubic {{ k: {k} }}"),
            PotentialKind::Custom { .. } => write!(fm, "Custom"),
        }
    }
}

/// A double-well nonlinearity together with its derived constants.
///
/// Immutable after construction; evaluators must be pure. Cloning is cheap
/// (custom evaluators are shared behind `Arc`).
#[derive(Clone, Debug)]
pub struct PotentialSpec {
    kind: PotentialKind,
    lambda: f64,
    lipschitz: f64,
    descriptor: String,
}

impl PotentialSpec {
    /// Builds a cubic double well `f(u) = k·u(u² - 1)` with `λ = k`, `L = 2k`.
    pub fn cubic(k: f64) -> Result<Self, ModelError> {
        if !(k > 0.0) {
            return Err(ModelError::NonPositiveK(k));
        }
        Ok(PotentialSpec {
            kind: PotentialKind::Cubic { k },
            lambda: k,
            lipschitz: 2.0 * k,
            descriptor: format!("cubic(k={k})"),
        })
    }

    /// Wraps user-supplied evaluators. `lambda` and `lipschitz` are computed
    /// from `fprime` (`λ = -f'(0)`, `L` by dense sampling on `[-1, 1]`).
    pub fn from_fns(
        f: ScalarFn,
        big_f: ScalarFn,
        fprime: ScalarFn,
        descriptor: impl Into<String>,
    ) -> Self {
        let lambda = -fprime(0.0);
        let mut spec = PotentialSpec {
            kind: PotentialKind::Custom { f, big_f, fprime },
            lambda,
            lipschitz: 0.0,
            descriptor: descriptor.into(),
        };
        spec.lipschitz = lipschitz_on_interval(&spec, 4096).unwrap_or(f64::NAN);
        spec
    }

    pub fn f(&self, s: f64) -> f64 {
        match &self.kind {
            PotentialKind::Cubic { k } => k * s * (s * s - 1.0),
            PotentialKind::Custom { f, .. } => f(s),
        }
    }

    /// The potential `F` with `F(1) = 0`.
    pub fn big_f(&self, s: f64) -> f64 {
        match &self.kind {
            PotentialKind::Cubic { k } => {
                let w = s * s - 1.0;
                0.25 * k * w * w
            }
            PotentialKind::Custom { big_f, .. } => big_f(s),
        }
    }

    pub fn fprime(&self, s: f64) -> f64 {
        match &self.kind {
            PotentialKind::Cubic { k } => k * (3.0 * s * s - 1.0),
            PotentialKind::Custom { fprime, .. } => fprime(s),
        }
    }

    /// `λ = -f'(0)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Lipschitz constant of `f` on `[-1, 1]`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn is_cubic(&self) -> bool {
        matches!(self.kind, PotentialKind::Cubic { .. })
    }
}

/// Convenience constructor matching the toolkit's naming.
pub fn cubic_potential(k: f64) -> Result<PotentialSpec, ModelError> {
    PotentialSpec::cubic(k)
}

/// Dimension of the hyperbolic space plus the nonlinearity.
#[derive(Clone, Debug)]
pub struct ProblemParams {
    pub n: u32,
    pub potential: PotentialSpec,
}

impl ProblemParams {
    pub fn new(n: u32, potential: PotentialSpec) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(ModelError::BadDimension(n));
        }
        Ok(ProblemParams { n, potential })
    }

    /// `n - 1` as a float; the drift coefficient of every reduction.
    pub fn nm1(&self) -> f64 {
        f64::from(self.n - 1)
    }
}

/// The roots of `α² - (n-1)α + mu = 0` in increasing order.
///
/// Uses the product form for the small root so that Vieta's identities hold
/// to machine precision even when `mu` is tiny.
pub fn indicial_roots(n: u32, mu: f64) -> Result<(f64, f64), ModelError> {
    assert!(n >= 2, "indicial_roots requires n >= 2");
    assert!(mu > 0.0, "indicial_roots requires mu > 0");
    let b = f64::from(n - 1);
    let disc = b * b - 4.0 * mu;
    if disc < 0.0 {
        return Err(ModelError::ComplexRoots {
            n,
            mu,
            discriminant: disc,
        });
    }
    let sq = disc.sqrt();
    let plus = 0.5 * (b + sq);
    let minus = mu / plus;
    Ok((minus, plus))
}

/// The four exponents of the two indicial quadratics (for `λ` and `L`),
/// with discriminants. `beta` is `None` when `L > (n-1)²/4`.
#[derive(Clone, Debug)]
pub struct IndicialRoots {
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub beta_minus: Option<f64>,
    pub beta_plus: Option<f64>,
    pub disc_lambda: f64,
    pub disc_l: f64,
}

impl IndicialRoots {
    pub fn compute(params: &ProblemParams) -> Result<Self, ModelError> {
        let b = params.nm1();
        let lambda = params.potential.lambda();
        let lip = params.potential.lipschitz();
        let (am, ap) = indicial_roots(params.n, lambda)?;
        let disc_l = b * b - 4.0 * lip;
        let beta = indicial_roots(params.n, lip).ok();
        Ok(IndicialRoots {
            alpha_minus: am,
            alpha_plus: ap,
            beta_minus: beta.map(|r| r.0),
            beta_plus: beta.map(|r| r.1),
            disc_lambda: b * b - 4.0 * lambda,
            disc_l,
        })
    }
}

/// One pass/fail entry of a validation or chain report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub pass: bool,
    /// Sample where the condition came closest to failing (or failed worst).
    pub worst_sample: f64,
    pub worst_value: f64,
}

/// Outcome of [`validate_potential`]; carries failures instead of erroring.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
    pub all_pass: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Samples the double-well conditions: `F(±1) = 0`, `F > 0` between the
/// wells, `F''(±1) > 0` (centered differences of `f'` with step 1e-5),
/// `s·f(s) ≥ 0` for `|s| ≥ 1`, `f'(0) < 0`, `λ ≤ L`, and outward growth of
/// `F` on `|s| ≤ 10` (a heuristic stand-in for `F(s) → ∞`).
pub fn validate_potential(
    spec: &PotentialSpec,
    samples: usize,
) -> Result<ValidationReport, ModelError> {
    if samples < 100 {
        return Err(ModelError::TooFewSamples {
            min: 100,
            got: samples,
        });
    }
    let mut checks = Vec::new();

    let f1 = spec.big_f(1.0);
    let fm1 = spec.big_f(-1.0);
    let (worst_s, worst_v) = if f1.abs() >= fm1.abs() {
        (1.0, f1)
    } else {
        (-1.0, fm1)
    };
    checks.push(ConditionCheck {
        name: "F(-1) = F(1) = 0".into(),
        pass: f1.abs() <= 1e-12 && fm1.abs() <= 1e-12,
        worst_sample: worst_s,
        worst_value: worst_v,
    });

    // F > 0 strictly between the wells, away from the roots themselves.
    let mut min_f = f64::INFINITY;
    let mut min_at = 0.0;
    for i in 0..samples {
        let s = -1.0 + 2.0 * (i as f64 + 0.5) / samples as f64;
        if (s.abs() - 1.0).abs() < 1e-3 {
            continue;
        }
        let v = spec.big_f(s);
        if v < min_f {
            min_f = v;
            min_at = s;
        }
    }
    checks.push(ConditionCheck {
        name: "F > 0 on (-1,1) \\ {±1}".into(),
        pass: min_f > 0.0,
        worst_sample: min_at,
        worst_value: min_f,
    });

    // F''(±1) > 0 via centered differences on f'.
    let h = 1e-5;
    let fpp = |s: f64| (spec.f(s + h) - spec.f(s - h)) / (2.0 * h);
    let fpp1 = fpp(1.0);
    let fppm1 = fpp(-1.0);
    checks.push(ConditionCheck {
        name: "F''(±1) > 0".into(),
        pass: fpp1 > 0.0 && fppm1 > 0.0,
        worst_sample: if fpp1 <= fppm1 { 1.0 } else { -1.0 },
        worst_value: fpp1.min(fppm1),
    });

    // s·f(s) ≥ 0 outside the wells, sampled on 1 ≤ |s| ≤ 10.
    let mut min_sf = f64::INFINITY;
    let mut min_sf_at = 1.0;
    for i in 0..samples {
        let s = 1.0 + 9.0 * i as f64 / (samples - 1) as f64;
        for s in [s, -s] {
            let v = s * spec.f(s);
            if v < min_sf {
                min_sf = v;
                min_sf_at = s;
            }
        }
    }
    checks.push(ConditionCheck {
        name: "s·f(s) >= 0 for |s| >= 1".into(),
        pass: min_sf >= -1e-12,
        worst_sample: min_sf_at,
        worst_value: min_sf,
    });

    let fp0 = spec.fprime(0.0);
    checks.push(ConditionCheck {
        name: "f'(0) < 0".into(),
        pass: fp0 < 0.0,
        worst_sample: 0.0,
        worst_value: fp0,
    });

    checks.push(ConditionCheck {
        name: "lambda <= lipschitz".into(),
        pass: spec.lambda() <= spec.lipschitz() + 1e-12,
        worst_sample: 0.0,
        worst_value: spec.lipschitz() - spec.lambda(),
    });

    // Outward growth on |s| <= 10 (heuristic for F(s) -> ∞).
    let mut grow_ok = true;
    let mut worst_drop = 0.0;
    let mut worst_at = 1.0;
    let m = samples.min(512);
    for side in [1.0, -1.0] {
        let mut prev = spec.big_f(side);
        for i in 1..=m {
            let s = side * (1.0 + 9.0 * i as f64 / m as f64);
            let v = spec.big_f(s);
            if v < prev - 1e-10 && v - prev < worst_drop {
                worst_drop = v - prev;
                worst_at = s;
                grow_ok = false;
            }
            prev = v;
        }
    }
    checks.push(ConditionCheck {
        name: "F grows outward on |s| <= 10".into(),
        pass: grow_ok,
        worst_sample: worst_at,
        worst_value: worst_drop,
    });

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(ValidationReport { checks, all_pass })
}

/// Max of `|f'|` over `[-1, 1]`: dense grid plus golden-section refinement
/// around the grid argmax. Cubic potentials short-circuit to the closed
/// form `2k`.
pub fn lipschitz_on_interval(spec: &PotentialSpec, grid_size: usize) -> Result<f64, ModelError> {
    if let PotentialKind::Cubic { k } = spec.kind {
        return Ok(2.0 * k);
    }
    if grid_size < 1000 {
        return Err(ModelError::TooFewSamples {
            min: 1000,
            got: grid_size,
        });
    }
    let g = |s: f64| spec.fprime(s).abs();
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 0;
    for i in 0..=grid_size {
        let s = -1.0 + 2.0 * i as f64 / grid_size as f64;
        let v = g(s);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let step = 2.0 / grid_size as f64;
    let lo = (-1.0 + best_i as f64 * step - step).max(-1.0);
    let hi = (-1.0 + best_i as f64 * step + step).min(1.0);
    Ok(golden_max(g, lo, hi, 1e-10).max(best))
}

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while b - a > tol {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    gc.max(gd)
}

/// Report of the root-chain comparison `0 < α₋ ≤ β₋ ≤ (n-1)/2 ≤ β₊ ≤ α₊ < n-1`.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub roots: IndicialRoots,
    /// Whether `L ≤ (n-1)²/4`, i.e. the chain is asserted at all.
    pub applicable: bool,
    pub inequalities: Vec<ConditionCheck>,
    pub chain_holds: bool,
}

/// Computes `α±` from `λ` and `β±` from `L` and checks the ordering chain.
/// When `L > (n-1)²/4` the β roots are complex and the report comes back
/// `applicable: false` rather than erroring.
pub fn root_chain_check(params: &ProblemParams) -> Result<ChainReport, ModelError> {
    let roots = IndicialRoots::compute(params)?;
    let b = params.nm1();
    let half = 0.5 * b;
    let applicable = roots.beta_minus.is_some();
    let mut inequalities = Vec::new();
    let mut push = |name: &str, lhs: f64, rhs: f64| {
        inequalities.push(ConditionCheck {
            name: name.into(),
            pass: lhs <= rhs + 1e-12,
            worst_sample: lhs,
            worst_value: rhs - lhs,
        });
    };
    push("0 < alpha_-", 0.0, roots.alpha_minus - f64::MIN_POSITIVE);
    if let (Some(bm), Some(bp)) = (roots.beta_minus, roots.beta_plus) {
        push("alpha_- <= beta_-", roots.alpha_minus, bm);
        push("beta_- <= (n-1)/2", bm, half);
        push("(n-1)/2 <= beta_+", half, bp);
        push("beta_+ <= alpha_+", bp, roots.alpha_plus);
    }
    push("alpha_+ < n-1", roots.alpha_plus, b - f64::MIN_POSITIVE);
    let chain_holds = applicable && inequalities.iter().all(|c| c.pass);
    Ok(ChainReport {
        roots,
        applicable,
        inequalities,
        chain_holds,
    })
}
