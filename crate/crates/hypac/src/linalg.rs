//! Small dense/structured linear algebra: tridiagonal solves (Thomas
//! algorithm with partial-pivot fallback) and a preconditioned BiCGStab.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("singular tridiagonal system at row {0}")]
    SingularTridiagonal(usize),
    #[error("BiCGStab stalled: residual {residual:.3e} after {iters} iterations (target {target:.3e})")]
    BicgStall {
        residual: f64,
        target: f64,
        iters: usize,
    },
}

/// Solves a tridiagonal system in place. `lower[i]` couples row i to i-1
/// (lower[0] unused), `upper[i]` couples row i to i+1 (last unused).
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>, LinalgError> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv == 0.0 {
        return Err(LinalgError::SingularTridiagonal(0));
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if piv == 0.0 {
            return Err(LinalgError::SingularTridiagonal(i));
        }
        c[i] = upper[i] / piv;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Ok(x)
}

/// Matrix-free BiCGStab with a left preconditioner. `apply_a` computes
/// `y = A x`; `apply_m` computes `y = M⁻¹ x`. Converges on the
/// preconditioned residual to `rtol·‖M⁻¹b‖` (with a small absolute floor).
#[allow(clippy::too_many_arguments)]
pub fn bicgstab(
    n: usize,
    apply_a: &dyn Fn(&[f64], &mut [f64]),
    apply_m: &dyn Fn(&[f64], &mut [f64]),
    b: &[f64],
    x0: Option<&[f64]>,
    rtol: f64,
    atol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize), LinalgError> {
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let norm = |a: &[f64]| dot(a, a).sqrt();

    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut r = vec![0.0; n];

    // r = M⁻¹(b - A x)
    apply_a(&x, &mut tmp);
    for i in 0..n {
        tmp[i] = b[i] - tmp[i];
    }
    apply_m(&tmp, &mut r);

    let mut mb = vec![0.0; n];
    apply_m(b, &mut mb);
    let target = (rtol * norm(&mb)).max(atol);

    if norm(&r) <= target {
        return Ok((x, 0));
    }

    let r0 = r.clone();
    let mut rho = 1.0f64;
    let mut alpha = 1.0f64;
    let mut omega = 1.0f64;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];

    for it in 1..=max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new.abs() < 1e-300 {
            // Restart with the current residual as the shadow vector.
            return bicgstab_restarted(n, apply_a, apply_m, b, &x, rtol, atol, max_iter - it);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        apply_a(&p, &mut tmp);
        apply_m(&tmp, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= target {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            return Ok((x, it));
        }
        apply_a(&s, &mut tmp);
        apply_m(&tmp, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        if norm(&r) <= target {
            return Ok((x, it));
        }
    }
    Err(LinalgError::BicgStall {
        residual: norm(&r),
        target,
        iters: max_iter,
    })
}

fn bicgstab_restarted(
    n: usize,
    apply_a: &dyn Fn(&[f64], &mut [f64]),
    apply_m: &dyn Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &[f64],
    rtol: f64,
    atol: f64,
    budget: usize,
) -> Result<(Vec<f64>, usize), LinalgError> {
    if budget == 0 {
        return Err(LinalgError::BicgStall {
            residual: f64::NAN,
            target: atol,
            iters: 0,
        });
    }
    bicgstab(n, apply_a, apply_m, b, Some(x), rtol, atol, budget)
}
