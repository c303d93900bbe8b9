//! The toolkit's acceptance suite: ten quantitative criteria covering the
//! explicit parabolic family, the shooting and BVP connections, the
//! indicial-root algebra, the disk symmetry checks, the constant-solution
//! rigidity, and the perturbative families, plus a final pass verifying the
//! integrated energy identity on every 1D profile the suite produced.
//!
//! `run_all(quick)` executes every criterion and returns one result per
//! criterion; `quick` runs reduced resolutions with proportionally relaxed
//! grid-dependent thresholds (marked in the output).

use std::time::Instant;

use crate::diagnostics::{energy_identity_residual, flux_identity_residual, Profile1D};
use crate::disk::{self, BoundaryData, DiskGrid};
use crate::hyperbolic;
use crate::model::{self, PotentialSpec, ProblemParams};
use crate::parabolic::{self, OrbitOutcome};
use crate::perturb::{self, PhiMode, StripGrid};
use crate::radial::{self, RadialOutcome};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    /// Human-readable measured quantities.
    pub measured: String,
    /// The thresholds being enforced.
    pub requirement: String,
    pub seconds: f64,
    pub quick: bool,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] C{:02} {}: {} (req: {}) [{:.2}s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.requirement,
            self.seconds
        )
    }
}

fn params(n: u32, k: f64) -> ProblemParams {
    ProblemParams::new(n, PotentialSpec::cubic(k).unwrap()).unwrap()
}

struct Bag {
    profiles: Vec<(String, Profile1D)>,
}

impl Bag {
    fn push(&mut self, name: impl Into<String>, p: Profile1D) {
        self.profiles.push((name.into(), p));
    }
}

/// Runs the whole suite.
pub fn run_all(quick: bool) -> Vec<CriterionResult> {
    let mut bag = Bag {
        profiles: Vec::new(),
    };
    let mut out = Vec::new();
    out.push(c1_explicit_residual(quick));
    out.push(c2_heteroclinic_vs_explicit(quick, &mut bag));
    out.push(c3_indicial_sweep(quick));
    out.push(c4_radial_family(quick, &mut bag));
    out.push(c5_nonexistence(quick, &mut bag));
    let (c6, hyper_profile) = c6_hyperbolic(quick, &mut bag);
    out.push(c6);
    out.push(c7_disk_symmetry(quick, hyper_profile.as_ref()));
    out.push(c8_constant_rigidity(quick));
    out.push(c9_perturbative(quick));
    out.push(c10_identity_suite(quick, &bag));
    out
}

fn budget(pass: &mut bool, seconds: f64, limit: f64) -> String {
    if seconds > limit {
        *pass = false;
    }
    format!("runtime < {limit:.0} s")
}

fn c1_explicit_residual(quick: bool) -> CriterionResult {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [2u32, 3, 5] {
        worst = worst.max(parabolic::explicit_solution_residual(n));
    }
    let seconds = t0.elapsed().as_secs_f64();
    let mut pass = worst < 1e-10;
    let b = budget(&mut pass, seconds, 1.0);
    CriterionResult {
        id: 1,
        name: "explicit-solution reproduction (n = 2, 3, 5)".into(),
        pass,
        measured: format!("max residual {worst:.3e}"),
        requirement: format!("< 1e-10; {b}"),
        seconds,
        quick,
    }
}

fn c2_heteroclinic_vs_explicit(quick: bool, bag: &mut Bag) -> CriterionResult {
    let t0 = Instant::now();
    let p = params(2, 2.0 / 9.0);
    let (pass, measured);
    match parabolic::heteroclinic_profile(&p, 1e-12) {
        Ok(h) => {
            let mut sup: f64 = 0.0;
            for (i, &xi) in h.xi_profile.grid.iter().enumerate() {
                sup = sup.max((h.xi_profile.values[i] - parabolic::explicit_profile_xi(2, xi)).abs());
            }
            bag.push("heteroclinic xi-profile (n=2, k=2/9)", h.xi_profile.clone());
            pass = sup < 1e-6;
            measured = format!("sup |u - x^(1/3)/(1+x^(1/3))| = {sup:.3e}");
        }
        Err(e) => {
            pass = false;
            measured = format!("solver error: {e}");
        }
    }
    let seconds = t0.elapsed().as_secs_f64();
    let mut pass = pass;
    let b = budget(&mut pass, seconds, 5.0);
    CriterionResult {
        id: 2,
        name: "shooting connection matches the closed form".into(),
        pass,
        measured,
        requirement: format!("< 1e-6 after normalization; {b}"),
        seconds,
        quick,
    }
}

fn c3_indicial_sweep(quick: bool) -> CriterionResult {
    let t0 = Instant::now();
    let mut worst_quad: f64 = 0.0;
    let mut worst_vieta: f64 = 0.0;
    let mut chain_fail = 0usize;
    let mut count = 0usize;
    for n in 2u32..=11 {
        let b = f64::from(n - 1);
        for j in 1..=5 {
            let lam = b * b / 4.0 * j as f64 / 6.0;
            count += 1;
            let (lo, hi) = model::indicial_roots(n, lam).unwrap();
            for r in [lo, hi] {
                worst_quad = worst_quad.max((r * r - b * r + lam).abs());
            }
            worst_vieta = worst_vieta
                .max((lo + hi - b).abs() / b.max(1.0))
                .max((lo * hi - lam).abs() / lam.max(1.0));
            // Chain check with the cubic potential of the same lambda
            // (L = 2k): only asserted when L <= (n-1)²/4.
            let pp = params(n, lam);
            let rep = model::root_chain_check(&pp).unwrap();
            if rep.applicable && !rep.chain_holds {
                chain_fail += 1;
            }
        }
    }
    let seconds = t0.elapsed().as_secs_f64();
    let mut pass = count >= 50 && worst_quad < 1e-10 && worst_vieta < 1e-12 && chain_fail == 0;
    let b = budget(&mut pass, seconds, 1.0);
    CriterionResult {
        id: 3,
        name: format!("indicial roots over {count} (n, lambda) pairs"),
        pass,
        measured: format!(
            "quad residual {worst_quad:.2e}, Vieta {worst_vieta:.2e}, chain failures {chain_fail}"
        ),
        requirement: format!("quad < 1e-10, Vieta < 1e-12, chain holds; {b}"),
        seconds,
        quick,
    }
}

fn c4_radial_family(quick: bool, bag: &mut Bag) -> CriterionResult {
    let t0 = Instant::now();
    let p = params(3, 0.5);
    let r_max = 20.0;
    let (alpha_minus, _) = model::indicial_roots(3, 0.5).unwrap();
    let entries = radial::sweep_family(&p, &[0.1, 0.3, 0.5, 0.7], r_max, 1e-10);
    let mut pass = true;
    let mut worst_fit: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    let mut worst_flux: f64 = 0.0;
    for e in &entries {
        match &e.run {
            Ok((run, fit)) => {
                if run.outcome != RadialOutcome::TendsToZero {
                    pass = false;
                }
                let fit = fit.as_ref().expect("tail fit");
                worst_fit = worst_fit.max(((fit.exponent - alpha_minus) / alpha_minus).abs());
                worst_energy =
                    worst_energy.max(energy_identity_residual(&run.profile).unwrap());
                // Flux identity evaluated on the canonical [1, 5] window
                // (the absolute residual scales with sinh^{n-1} r and is
                // not meaningful at the far end of the grid).
                worst_flux =
                    worst_flux.max(flux_identity_residual(&run.profile, 1.0, 5.0).unwrap());
                bag.push(
                    format!("radial profile a = {} (n=3, k=0.5)", e.a),
                    run.profile.clone(),
                );
            }
            Err(err) => {
                pass = false;
                worst_fit = f64::NAN;
                eprintln!("radial a = {}: {err}", e.a);
            }
        }
    }
    pass = pass && worst_fit < 0.02 && worst_energy < 1e-5 && worst_flux < 1e-5;
    let seconds = t0.elapsed().as_secs_f64();
    let b = budget(&mut pass, seconds, 10.0);
    CriterionResult {
        id: 4,
        name: "radial family (n=3, k=0.5, a in {0.1,0.3,0.5,0.7})".into(),
        pass,
        measured: format!(
            "fit deviation {:.2}%, energy {worst_energy:.2e}, flux[1,5] {worst_flux:.2e}",
            100.0 * worst_fit
        ),
        requirement: format!("tends_to_zero, fit within 2%, identities < 1e-5; {b}"),
        seconds,
        quick,
    }
}

fn c5_nonexistence(quick: bool, bag: &mut Bag) -> CriterionResult {
    let t0 = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for (n, k) in [(2u32, 2.0 / 9.0), (3, 1.0), (4, 2.0)] {
        let pp = params(n, k);
        match parabolic::nonexistence_certificate(&pp, 1e-10) {
            Ok(rep) => {
                if !rep.passes || matches!(rep.outcome, OrbitOutcome::CrossesAxis { .. }) {
                    pass = false;
                }
                notes.push(format!("(n={n}) v(u=1) = {:.3}", rep.v_at_u1.unwrap_or(f64::NAN)));
                // The underlying orbit is a produced profile; recompute it
                // for the identity suite.
                if let Ok(orbit) = parabolic::shoot_manifold(
                    &pp,
                    (-1.0, 0.0),
                    parabolic::Branch::UnstableUp,
                    1e-8,
                    400.0,
                    1e-10,
                ) {
                    if let Ok(prof) = orbit.profile(&pp) {
                        bag.push(format!("certificate orbit (n={n}, k={k})"), prof);
                    }
                }
            }
            Err(e) => {
                pass = false;
                notes.push(format!("(n={n}): error {e}"));
            }
        }
    }
    let seconds = t0.elapsed().as_secs_f64();
    let b = budget(&mut pass, seconds, 10.0);
    CriterionResult {
        id: 5,
        name: "nonexistence certificates (passes_above)".into(),
        pass,
        measured: notes.join(", "),
        requirement: format!("all passes_above with v > 0; {b}"),
        seconds,
        quick,
    }
}

fn c6_hyperbolic(quick: bool, bag: &mut Bag) -> (CriterionResult, Option<Profile1D>) {
    let t0 = Instant::now();
    let p = params(2, 2.0 / 9.0);
    let t_half = 20.0;
    let n_base = if quick { 2000 } else { 4000 };
    let mut pass;
    let mut measured = Vec::new();
    let mut keep_profile = None;

    match hyperbolic::minimize_profile(&p, t_half, n_base, 1e-9) {
        Ok(mini) => match hyperbolic::newton_profile(&p, t_half, n_base, 1e-11, &mini.profile) {
            Ok(newt) => {
                let sup_diff = mini
                    .profile
                    .values
                    .iter()
                    .zip(&newt.profile.values)
                    .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));
                let u0 = newt.profile.interp(0.0).abs();
                let (mono, _) = hyperbolic::check_monotone(&newt);
                let rates = hyperbolic::tail_rates(&newt).unwrap();
                let rate_rel = ((rates.mu_plus_fitted - rates.mu_plus_linearized)
                    / rates.mu_plus_linearized)
                    .abs();
                // Richardson under N doubling.
                let nr1 = n_base / 2;
                let r1 = hyperbolic::newton_profile(&p, t_half, nr1, 1e-11, &mini.profile).unwrap();
                let r2 = &newt;
                let r4 =
                    hyperbolic::newton_profile(&p, t_half, n_base * 2, 1e-11, &mini.profile)
                        .unwrap();
                let d12 = (0..=nr1)
                    .map(|j| (r1.profile.values[j] - r2.profile.values[2 * j]).abs())
                    .fold(0.0f64, f64::max);
                let d24 = (0..=n_base)
                    .map(|j| (r2.profile.values[j] - r4.profile.values[2 * j]).abs())
                    .fold(0.0f64, f64::max);
                let ratio = d12 / d24;

                pass = sup_diff < 1e-6
                    && mono
                    && u0 < 1e-8
                    && rate_rel < 0.03
                    && (3.5..=4.5).contains(&ratio);
                measured.push(format!(
                    "agree {sup_diff:.2e}, U(0) {u0:.2e}, rate dev {:.2}%, Richardson {ratio:.2}",
                    100.0 * rate_rel
                ));
                bag.push("hyperbolic minimizer (T=20)", mini.profile.clone());
                bag.push("hyperbolic Newton (T=20)", newt.profile.clone());
                keep_profile = Some(newt.profile.clone());
            }
            Err(e) => {
                pass = false;
                measured.push(format!("newton error: {e}"));
            }
        },
        Err(e) => {
            pass = false;
            measured.push(format!("minimize error: {e}"));
        }
    }
    let seconds = t0.elapsed().as_secs_f64();
    let b = budget(&mut pass, seconds, 30.0);
    (
        CriterionResult {
            id: 6,
            name: "hyperbolic connection (n=2, k=2/9, T=20)".into(),
            pass,
            measured: measured.join("; "),
            requirement: format!(
                "agree < 1e-6, monotone, U(0) < 1e-8, rate within 3% of -4/3, ratio in [3.5,4.5]; {b}"
            ),
            seconds,
            quick,
        },
        keep_profile,
    )
}

fn c7_disk_symmetry(quick: bool, hyper: Option<&Profile1D>) -> CriterionResult {
    let t0 = Instant::now();
    let p = params(2, 2.0 / 9.0);
    let (r_trunc, nr, nt, dev_tol, cmp_tol) = if quick {
        (10.0, 250, 256, 2e-2, 2e-2)
    } else {
        (12.0, 600, 512, 5e-3, 5e-3)
    };
    let mut pass = true;
    let mut measured = Vec::new();

    let grid = DiskGrid::new(r_trunc, nr, nt).unwrap();
    match disk::solve_disk(&p, &BoundaryData::HhStep, &grid, 1e-10) {
        Ok(sol) => {
            let levels = [0.0, 1.0, -1.0, 2.0, -2.0];
            let dev = disk::symmetry_deviation(&sol, &levels).unwrap();
            // One refinement step.
            let fine = DiskGrid::new(r_trunc, 2 * nr, 2 * nt).unwrap();
            let dev_fine = match disk::solve_disk(&p, &BoundaryData::HhStep, &fine, 1e-10) {
                Ok(sf) => disk::symmetry_deviation(&sf, &levels).unwrap(),
                Err(e) => {
                    measured.push(format!("refined solve failed: {e}"));
                    pass = false;
                    f64::NAN
                }
            };
            // Profile-consistent boundary comparison.
            let cmp = match hyper {
                Some(prof) => {
                    let sol2 =
                        disk::solve_disk(&p, &BoundaryData::ProfileTrace(prof), &grid, 1e-10)
                            .unwrap();
                    disk::compare_with_profile(&sol2, prof).unwrap()
                }
                None => f64::NAN,
            };
            pass = pass
                && dev < dev_tol
                && dev_fine.is_finite()
                && dev_fine <= 0.5 * dev
                && cmp.is_finite()
                && cmp < cmp_tol;
            measured.push(format!(
                "deviation {dev:.2e} -> {dev_fine:.2e} refined, profile comparison {cmp:.2e}"
            ));
        }
        Err(e) => {
            pass = false;
            measured.push(format!("solve error: {e}"));
        }
    }
    let seconds = t0.elapsed().as_secs_f64();
    let b = budget(&mut pass, seconds, 300.0);
    CriterionResult {
        id: 7,
        name: format!("disk symmetry (R={r_trunc}, {nr}x{nt})"),
        pass,
        measured: measured.join("; "),
        requirement: format!(
            "deviation < {dev_tol:.0e} halving under refinement, comparison < {cmp_tol:.0e}; {b}"
        ),
        seconds,
        quick,
    }
}

fn c8_constant_rigidity(quick: bool) -> CriterionResult {
    let t0 = Instant::now();
    let p = params(2, 2.0 / 9.0);
    let grid = DiskGrid::new(10.0, 200, 128).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for c in [1.0, -1.0, 0.0] {
        match disk::solve_disk(&p, &BoundaryData::Constant(c), &grid, 1e-11) {
            Ok(sol) => {
                let exact = sol.values.iter().all(|&v| v == c) && sol.newton_iterations == 0;
                if !exact {
                    pass = false;
                }
                notes.push(format!("c={c}: {} corrections", sol.newton_iterations));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("c={c}: {e}"));
            }
        }
    }
    let seconds = t0.elapsed().as_secs_f64();
    let b = budget(&mut pass, seconds, 10.0);
    CriterionResult {
        id: 8,
        name: "constant rigidity (boundary ±1 and 0)".into(),
        pass,
        measured: notes.join(", "),
        requirement: format!("constant solutions, zero Newton corrections; {b}"),
        seconds,
        quick,
    }
}

fn c9_perturbative(quick: bool) -> CriterionResult {
    let t0 = Instant::now();
    let p = params(2, 2.0 / 9.0);
    let tol = 1e-11;
    let phi = [PhiMode {
        index: 1,
        cos_coef: 1.0,
        sin_coef: 0.0,
    }];
    let mut pass = true;
    let mut notes = Vec::new();

    let grid = if quick {
        DiskGrid::new(12.0, 300, 128).unwrap()
    } else {
        DiskGrid::new(12.0, 600, 512).unwrap()
    };
    match perturb::contract_elliptic(&p, &phi, 0.02, &grid, tol) {
        Ok(sol) => {
            let ratio = sol.contraction_ratio();
            let exp_dev = ((sol.leading_exponent - 1.0 / 3.0) * 3.0).abs();
            let witness_ok = sol.nonsymmetry_witness > 10.0 * tol;
            if !(ratio < 0.5 && exp_dev < 0.02 && witness_ok && sol.residual_sup < 10.0 * tol) {
                pass = false;
            }
            notes.push(format!(
                "elliptic: ratio {ratio:.2}, exponent {:.4}, witness {:.1e}, residual {:.1e}",
                sol.leading_exponent, sol.nonsymmetry_witness, sol.residual_sup
            ));
        }
        Err(e) => {
            pass = false;
            notes.push(format!("elliptic error: {e}"));
        }
    }

    let sgrid = if quick {
        StripGrid {
            n_xi: 2200,
            n_y: 128,
            kmax: 8,
            ..Default::default()
        }
    } else {
        StripGrid::default()
    };
    match perturb::contract_parabolic(&p, &phi, 0.02, &sgrid, tol) {
        Ok(sol) => {
            let ratio = sol.contraction_ratio();
            let exp_dev = ((sol.leading_exponent - 1.0 / 3.0) * 3.0).abs();
            let cusp = sol.cusp_residual.unwrap();
            let witness_ok = sol.nonsymmetry_witness > 10.0 * tol;
            if !(ratio < 0.5
                && exp_dev < 0.02
                && cusp < 1e-10
                && witness_ok
                && sol.residual_sup < 10.0 * tol)
            {
                pass = false;
            }
            notes.push(format!(
                "parabolic: ratio {ratio:.2}, exponent {:.4}, cusp {cusp:.1e}, witness {:.1e}",
                sol.leading_exponent, sol.nonsymmetry_witness
            ));
        }
        Err(e) => {
            pass = false;
            notes.push(format!("parabolic error: {e}"));
        }
    }
    let seconds = t0.elapsed().as_secs_f64();
    let b = budget(&mut pass, seconds, 600.0);
    CriterionResult {
        id: 9,
        name: "perturbative families (amplitude 0.02)".into(),
        pass,
        measured: notes.join("; "),
        requirement: format!(
            "ratio < 0.5, exponent within 2% of 1/3, cusp < 1e-10, witness > 10 tol; {b}"
        ),
        seconds,
        quick,
    }
}

fn c10_identity_suite(quick: bool, bag: &Bag) -> CriterionResult {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_name = String::from("none");
    let mut pass = !bag.profiles.is_empty();
    for (name, prof) in &bag.profiles {
        match energy_identity_residual(prof) {
            Ok(r) => {
                if r > worst {
                    worst = r;
                    worst_name = name.clone();
                }
            }
            Err(e) => {
                pass = false;
                worst_name = format!("{name} (error {e})");
            }
        }
    }
    pass = pass && worst < 1e-5;
    let seconds = t0.elapsed().as_secs_f64();
    CriterionResult {
        id: 10,
        name: format!("energy identity on all {} produced profiles", bag.profiles.len()),
        pass,
        measured: format!("worst {worst:.2e} ({worst_name})"),
        requirement: "< 1e-5 everywhere".into(),
        seconds,
        quick,
    }
}

