//! Adaptive Dormand–Prince 5(4) integration with continuous output and
//! event detection.
//!
//! The pair is the classic 7-stage FSAL tableau; the continuous extension is
//! the quartic interpolant built from the same stages (fourth-order accurate,
//! consistent with the pair). Events are located by sign change over an
//! accepted step followed by bisection on a cubic Hermite reconstruction of
//! the state, to 1e-10 in the independent variable.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h}); system too stiff for the tolerance")]
    StepFailure { t: f64, h: f64 },
    #[error("exceeded {0} steps")]
    TooManySteps(usize),
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-minus-fourth order error weights (includes the FSAL stage).
/// The fifth-order solution weights are the last row of `A` (FSAL).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Interpolant coefficients: y(t0 + θh) = y0 + h Σ_m θ^m (Σ_j P[j][m-1] k_j).
const P: [[f64; 4]; 7] = [
    [
        1.0,
        -8048581381.0 / 2820520608.0,
        8663915743.0 / 2820520608.0,
        -12715105075.0 / 11282082432.0,
    ],
    [0.0, 0.0, 0.0, 0.0],
    [
        0.0,
        131558114200.0 / 32700410799.0,
        -68118460800.0 / 10900136933.0,
        87487479700.0 / 32700410799.0,
    ],
    [
        0.0,
        -1754552775.0 / 470086768.0,
        14199869525.0 / 1410260304.0,
        -10690763975.0 / 1880347072.0,
    ],
    [
        0.0,
        127303824393.0 / 49829197408.0,
        -318862633887.0 / 49829197408.0,
        701980252875.0 / 199316789632.0,
    ],
    [
        0.0,
        -282668133.0 / 205662961.0,
        2019193451.0 / 616988883.0,
        -1453857185.0 / 822651844.0,
    ],
    [
        0.0,
        40617522.0 / 29380423.0,
        -110615467.0 / 29380423.0,
        69997945.0 / 29380423.0,
    ],
];

#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Cap on |h|; also bounds the dense-output interpolation error.
    pub max_step: f64,
    pub max_steps: usize,
    /// Initial step magnitude (sign is inferred from the direction).
    pub h0: f64,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            rtol: tol,
            atol: tol,
            max_step: 0.1,
            max_steps: 50_000_000,
            h0: 1e-4,
        }
    }
}

/// When an event fires relative to the sign of its function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

/// A scalar event function g(t, y); the integrator reports the first root.
pub struct Event<'a, const D: usize> {
    pub g: Box<dyn Fn(f64, &[f64; D]) -> f64 + 'a>,
    pub direction: Direction,
    /// Stop integrating when this event fires.
    pub terminal: bool,
    pub label: usize,
}

/// One accepted step with everything needed for continuous output.
#[derive(Clone, Debug)]
pub struct StepSeg<const D: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    pub f0: [f64; D],
    pub f1: [f64; D],
    /// Quartic coefficients Q[m][i], m = 0..4 (θ¹..θ⁴).
    pub q: [[f64; D]; 4],
}

impl<const D: usize> StepSeg<D> {
    /// Quartic dense output at t inside the step.
    pub fn eval(&self, t: f64) -> [f64; D] {
        let th = (t - self.t0) / self.h;
        let mut out = self.y0;
        let mut thp = th;
        for m in 0..4 {
            for i in 0..D {
                out[i] += self.h * thp * self.q[m][i];
            }
            thp *= th;
        }
        out
    }

    /// Cubic Hermite reconstruction (used for event root-finding).
    pub fn hermite(&self, t: f64) -> [f64; D] {
        let th = (t - self.t0) / self.h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        let mut out = [0.0; D];
        for i in 0..D {
            out[i] = h00 * self.y0[i]
                + h10 * self.h * self.f0[i]
                + h01 * self.y1[i]
                + h11 * self.h * self.f1[i];
        }
        out
    }
}

/// Result of an integration run.
pub struct Integration<const D: usize> {
    pub segs: Vec<StepSeg<D>>,
    pub t_end: f64,
    pub y_end: [f64; D],
    /// (event label, t, y) if a terminal event stopped the run.
    pub event: Option<(usize, f64, [f64; D])>,
    pub n_accepted: usize,
    pub n_rejected: usize,
}

impl<const D: usize> Integration<D> {
    pub fn t_start(&self) -> f64 {
        self.segs.first().map_or(self.t_end, |s| s.t0)
    }

    /// Dense-output sample at an arbitrary time within the covered span.
    pub fn at(&self, t: f64) -> [f64; D] {
        if self.segs.is_empty() {
            return self.y_end;
        }
        let fwd = self.segs[0].h > 0.0;
        // Binary search over the monotone sequence of step starts.
        let mut lo = 0usize;
        let mut hi = self.segs.len() - 1;
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            let after = if fwd {
                t >= self.segs[mid].t0
            } else {
                t <= self.segs[mid].t0
            };
            if after {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        self.segs[lo].eval(t)
    }

    pub fn sample(&self, ts: &[f64]) -> Vec<[f64; D]> {
        ts.iter().map(|&t| self.at(t)).collect()
    }
}

/// Integrates y' = f(t, y) from `t0` to `t_end` (either direction).
pub fn integrate<const D: usize>(
    f: impl Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    opts: &OdeOptions,
    events: &[Event<'_, D>],
) -> Result<Integration<D>, OdeError> {
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut fy = f(t, &y);
    let mut h = dir * opts.h0.abs().min(opts.max_step).min(span.max(1e-30));
    let mut segs = Vec::new();
    let mut n_accepted = 0;
    let mut n_rejected = 0;
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();

    while (t_end - t) * dir > 0.0 {
        if n_accepted + n_rejected > opts.max_steps {
            return Err(OdeError::TooManySteps(opts.max_steps));
        }
        if h.abs() < 1e-14 * span.max(1.0) {
            return Err(OdeError::StepFailure { t, h });
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }

        // Stages. k[0] reuses the FSAL derivative.
        let mut k = [[0.0; D]; 7];
        k[0] = fy;
        for s in 1..6 {
            let mut ys = y;
            for j in 0..s {
                for i in 0..D {
                    ys[i] += h * A[s][j] * k[j][i];
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y_new = y;
        for j in 0..6 {
            for i in 0..D {
                y_new[i] += h * A[6][j] * k[j][i];
            }
        }
        k[6] = f(t + h, &y_new);

        // Error estimate.
        let mut err_sq = 0.0;
        for i in 0..D {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            e *= h;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / D as f64).sqrt();

        if err <= 1.0 {
            // Accept; build the interpolant.
            let mut q = [[0.0; D]; 4];
            for (m, qm) in q.iter_mut().enumerate() {
                for i in 0..D {
                    let mut acc = 0.0;
                    for j in 0..7 {
                        acc += P[j][m] * k[j][i];
                    }
                    qm[i] = acc;
                }
            }
            let seg = StepSeg {
                t0: t,
                h,
                y0: y,
                y1: y_new,
                f0: k[0],
                f1: k[6],
                q,
            };

            // Event scan over the accepted step.
            let mut first: Option<(usize, f64)> = None;
            for (ei, ev) in events.iter().enumerate() {
                let g1 = (ev.g)(t + h, &y_new);
                let g0 = g_prev[ei];
                let crossed = match ev.direction {
                    Direction::Rising => g0 < 0.0 && g1 >= 0.0,
                    Direction::Falling => g0 > 0.0 && g1 <= 0.0,
                    Direction::Any => g0 * g1 < 0.0 || (g0 != 0.0 && g1 == 0.0),
                };
                if crossed {
                    let t_root = bisect_event(&seg, &ev.g, t, t + h, g0);
                    match first {
                        Some((_, tf)) if (t_root - tf) * dir >= 0.0 => {}
                        _ => first = Some((ei, t_root)),
                    }
                }
                g_prev[ei] = g1;
            }

            segs.push(seg);
            n_accepted += 1;

            if let Some((ei, t_root)) = first {
                if events[ei].terminal {
                    let y_root = segs.last().unwrap().eval(t_root);
                    return Ok(Integration {
                        segs,
                        t_end: t_root,
                        y_end: y_root,
                        event: Some((events[ei].label, t_root, y_root)),
                        n_accepted,
                        n_rejected,
                    });
                }
            }

            t += h;
            y = y_new;
            fy = k[6];
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            h = (h * fac).clamp(-opts.max_step, opts.max_step);
            if h == 0.0 {
                h = dir * opts.max_step;
            }
        } else {
            n_rejected += 1;
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= fac.min(0.9);
        }
    }

    Ok(Integration {
        segs,
        t_end: t,
        y_end: y,
        event: None,
        n_accepted,
        n_rejected,
    })
}

/// Bisection on the cubic Hermite reconstruction, to 1e-10 in t.
fn bisect_event<const D: usize>(
    seg: &StepSeg<D>,
    g: &dyn Fn(f64, &[f64; D]) -> f64,
    mut a: f64,
    mut b: f64,
    ga: f64,
) -> f64 {
    let mut sign_a = ga.signum();
    if sign_a == 0.0 {
        return a;
    }
    for _ in 0..200 {
        if (b - a).abs() < 1e-10 {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(m, &seg.hermite(m));
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == sign_a {
            a = m;
            sign_a = gm.signum();
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_accuracy() {
        let opts = OdeOptions::with_tol(1e-10);
        let sol = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &opts, &[]).unwrap();
        assert!((sol.y_end[0] - (-5.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_matches_step_endpoints_and_midpoints() {
        let opts = OdeOptions {
            max_step: 0.5,
            ..OdeOptions::with_tol(1e-9)
        };
        // Harmonic oscillator: y = (cos t, -sin t).
        let sol = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            6.0,
            &opts,
            &[],
        )
        .unwrap();
        for seg in &sol.segs {
            let end = seg.eval(seg.t0 + seg.h);
            for i in 0..2 {
                assert!((end[i] - seg.y1[i]).abs() < 1e-12, "θ=1 consistency");
            }
        }
        for &t in &[0.3, 1.7, 2.9, 4.1, 5.5] {
            let y = sol.at(t);
            assert!((y[0] - t.cos()).abs() < 1e-8);
            assert!((y[1] + t.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn backward_integration() {
        let opts = OdeOptions::with_tol(1e-10);
        let sol = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], -3.0, &opts, &[]).unwrap();
        assert!((sol.y_end[0] - (-3.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn event_located_to_tolerance() {
        // u(t) = cos t crosses zero at π/2.
        let opts = OdeOptions::with_tol(1e-10);
        let ev = Event {
            g: Box::new(|_, y: &[f64; 2]| y[0]),
            direction: Direction::Falling,
            terminal: true,
            label: 7,
        };
        let sol = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            &opts,
            &[ev],
        )
        .unwrap();
        let (label, t, y) = sol.event.unwrap();
        assert_eq!(label, 7);
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!(y[0].abs() < 1e-9);
    }

    #[test]
    fn tolerance_refinement_improves_accuracy() {
        let run = |tol: f64| {
            let opts = OdeOptions {
                max_step: 1.0,
                ..OdeOptions::with_tol(tol)
            };
            integrate(|t, y: &[f64; 1]| [t * y[0]], 0.0, [1.0], 2.0, &opts, &[])
                .unwrap()
                .y_end[0]
        };
        let exact = (2.0f64).exp();
        let e1 = (run(1e-6) - exact).abs();
        let e2 = (run(1e-10) - exact).abs();
        assert!(e2 < e1);
        assert!(e2 < 1e-8);
    }
}
