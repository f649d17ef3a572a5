//! Gauss–Legendre rules and adaptive 1D/2D integration.

use crate::error::DiagnosticsError;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            if n == 1 {
                p1 = x;
            }
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn_prev = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn_prev) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Newton starts from descending guesses; report ascending nodes.
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Fixed-order Gauss–Legendre integral of `f` over `[a, b]`.
pub fn gauss_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

const MAX_DEPTH: usize = 48;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. Fails if the subdivision budget is exhausted before the local
/// error estimates fall below the tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, DiagnosticsError> {
    assert!(b > a, "empty interval");
    assert!(tol > 0.0, "tolerance must be positive");
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH).map_err(|_| DiagnosticsError::QuadratureBudget { tol })
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, ()> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(());
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Nested adaptive integral of `f(x, y)` over `[ax, bx] x [ay, by]` to
/// absolute tolerance `tol`. The box is pre-split along the coordinate axes
/// when they cross it, so integrands with kinks on the axes stay smooth on
/// every panel.
pub fn adaptive_2d<F>(f: &F, ax: f64, bx: f64, ay: f64, by: f64, tol: f64) -> Result<f64, DiagnosticsError>
where
    F: Fn(f64, f64) -> f64,
{
    assert!(bx > ax && by > ay, "empty box");
    let xs = split_at_zero(ax, bx);
    let ys = split_at_zero(ay, by);
    let n_panels = (xs.len() - 1) * (ys.len() - 1);
    let panel_tol = tol / n_panels as f64;
    let mut total = 0.0;
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            total += panel(f, wx[0], wx[1], wy[0], wy[1], panel_tol)?;
        }
    }
    Ok(total)
}

fn split_at_zero(a: f64, b: f64) -> Vec<f64> {
    if a < 0.0 && b > 0.0 {
        vec![a, 0.0, b]
    } else {
        vec![a, b]
    }
}

fn panel<F>(f: &F, ax: f64, bx: f64, ay: f64, by: f64, tol: f64) -> Result<f64, DiagnosticsError>
where
    F: Fn(f64, f64) -> f64,
{
    let inner_tol = 0.5 * tol / (bx - ax);
    // The outer integrand is itself an adaptive integral; propagate its
    // failure through a poisoned value rather than unwinding.
    let failed = std::cell::Cell::new(false);
    let g = |x: f64| match adaptive_simpson(&|y| f(x, y), ay, by, inner_tol) {
        Ok(v) => v,
        Err(_) => {
            failed.set(true);
            0.0
        }
    };
    let outer = adaptive_simpson(&g, ax, bx, 0.5 * tol)?;
    if failed.get() {
        return Err(DiagnosticsError::QuadratureBudget { tol });
    }
    Ok(outer)
}
