//! Brute-force minimizers used to cross-check the proximal operators.
//!
//! These are diagnostic utilities (the `prox-check` CLI verb and the test
//! suites), deliberately independent of the closed forms and bisection they
//! validate: they scan a grid, refine, and return the best argument seen.
//! Never used by sampler steps.

use crate::point::Point;

/// Argmin of a 1D objective by multi-stage grid refinement over
/// `[center - radius, center + radius]`, final resolution ~1e-7.
pub fn grid_argmin_1d<F: Fn(f64) -> f64>(f: &F, center: f64, radius: f64) -> f64 {
    let mut lo = center - radius;
    let mut hi = center + radius;
    let mut best = center;
    // Three refinement passes of 2001 points bring the spacing from
    // radius/1000 down by 1e3 per pass.
    for _ in 0..3 {
        let n = 2000;
        let step = (hi - lo) / n as f64;
        let mut best_v = f64::INFINITY;
        for i in 0..=n {
            let y = lo + step * i as f64;
            let v = f(y);
            if v < best_v {
                best_v = v;
                best = y;
            }
        }
        lo = best - step;
        hi = best + step;
    }
    best
}

/// Argmin of a 1D objective on a fixed uniform grid (the literal
/// brute-force oracle; expensive but assumption-free).
pub fn grid_argmin_1d_fixed<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step).ceil() as usize;
    let mut best = lo;
    let mut best_v = f64::INFINITY;
    for i in 0..=n {
        let y = lo + step * i as f64;
        let v = f(y);
        if v < best_v {
            best_v = v;
            best = y;
        }
    }
    best
}

/// Argmin of a 2D objective by grid refinement centered at `center`,
/// final resolution ~1e-5 per coordinate.
///
/// Each pass re-centers on the best sample and shrinks the window to a
/// generous multiple of the previous spacing; prox objectives can have
/// valleys that are much flatter tangentially than radially, so a window of
/// a single cell around the best sample is not safe.
pub fn grid_argmin_2d<F: Fn(f64, f64) -> f64>(f: &F, center: (f64, f64), radius: f64) -> (f64, f64) {
    let mut cx = center.0;
    let mut cy = center.1;
    let mut r = radius;
    let mut step = 0.0;
    for pass in 0..8 {
        let n = if pass == 0 { 400 } else { 240 };
        step = 2.0 * r / n as f64;
        let mut best = (cx, cy);
        let mut best_v = f64::INFINITY;
        for i in 0..=n {
            let x = cx - r + step * i as f64;
            for j in 0..=n {
                let y = cy - r + step * j as f64;
                let v = f(x, y);
                if v < best_v {
                    best_v = v;
                    best = (x, y);
                }
            }
        }
        cx = best.0;
        cy = best.1;
        r = 30.0 * step;
        if step < 1e-6 {
            break;
        }
    }
    let _ = step;
    (cx, cy)
}

/// Brute-force `prox_{t g}(x)` for a separable scalar objective `phi`:
/// minimizes `phi(y) + (y - x)^2 / (2 t)` coordinatewise.
pub fn grid_prox_separable<F: Fn(f64) -> f64>(phi: &F, t: f64, x: &Point) -> Point {
    let out = x
        .as_slice()
        .iter()
        .map(|&xi| {
            let obj = |y: f64| phi(y) + (y - xi) * (y - xi) / (2.0 * t);
            grid_argmin_1d(&obj, xi, xi.abs() + 2.0 * t + 2.0)
        })
        .collect();
    Point::from_vec_unchecked(out)
}

/// Brute-force `prox_{t g}(x)` in 2D for a joint objective `g`.
pub fn grid_prox_2d<G: Fn(f64, f64) -> f64>(g: &G, t: f64, x: &Point) -> Point {
    assert_eq!(x.dim(), 2);
    let obj = |y0: f64, y1: f64| {
        g(y0, y1) + ((y0 - x[0]).powi(2) + (y1 - x[1]).powi(2)) / (2.0 * t)
    };
    let radius = x.norm_inf() + 2.0 * t + 2.0;
    let (y0, y1) = grid_argmin_2d(&obj, (x[0], x[1]), radius);
    Point::from_vec_unchecked(vec![y0, y1])
}

/// Central finite difference of a scalar function of a point, coordinate
/// `i`, spacing `h`.
pub fn central_difference<F: Fn(&Point) -> f64>(f: &F, x: &Point, i: usize, h: f64) -> f64 {
    let mut plus = x.clone();
    plus.as_mut_slice()[i] += h;
    let mut minus = x.clone();
    minus.as_mut_slice()[i] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// Moreau envelope of `|.|` in closed form (the Huber function), written
/// out directly so the oracle does not share code with the envelope
/// implementation it checks.
pub fn huber(v: f64, lam: f64) -> f64 {
    if v.abs() <= lam {
        v * v / (2.0 * lam)
    } else {
        v.abs() - 0.5 * lam
    }
}

/// Moreau envelope of the Euclidean norm in closed form (radial Huber).
pub fn l2_envelope(norm: f64, lam: f64) -> f64 {
    if norm <= lam {
        norm * norm / (2.0 * lam)
    } else {
        norm - 0.5 * lam
    }
}

/// One line of the prox cross-check report.
#[derive(Clone, Debug)]
pub struct ProxCheckLine {
    pub name: String,
    pub max_deviation: f64,
}

/// Runs `n_cases` random `(x, t)` draws per operator and reports the largest
/// deviation (max norm, in the argument) between each operator and the grid
/// brute-force minimizer of its defining objective.
pub fn prox_check_report(n_cases: usize, seed: u64) -> Vec<ProxCheckLine> {
    use crate::prox::{prox_l1, prox_l1_minus_eps_l2, prox_l2, prox_1d_convex, ScalarConvexFn};
    use crate::moreau::{prox_of_moreau, L1Norm, L2Norm};
    use crate::rng::RandomStream;

    let mut rng = RandomStream::new(seed, 0);
    let draw_x = |rng: &mut RandomStream| {
        Point::from_vec_unchecked(vec![1.5 * rng.normal(), 1.5 * rng.normal()])
    };
    let draw_t = |rng: &mut RandomStream| 0.1 + 1.9 / (1.0 + (-rng.normal()).exp());

    let mut lines = Vec::new();
    let dev = |a: &Point, b: &Point| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(u, v)| (u - v).abs())
            .fold(0.0f64, f64::max)
    };

    // Soft threshold (separable).
    let mut worst = 0.0f64;
    for _ in 0..n_cases {
        let (x, t) = (draw_x(&mut rng), draw_t(&mut rng));
        worst = worst.max(dev(&prox_l1(&x, t), &grid_prox_separable(&|y: f64| y.abs(), t, &x)));
    }
    lines.push(ProxCheckLine { name: "prox_l1".into(), max_deviation: worst });

    // Block soft threshold (joint 2D).
    let mut worst = 0.0f64;
    for _ in 0..n_cases {
        let (x, t) = (draw_x(&mut rng), draw_t(&mut rng));
        let oracle = grid_prox_2d(&|a, b| (a * a + b * b).sqrt(), t, &x);
        worst = worst.max(dev(&prox_l2(&x, t), &oracle));
    }
    lines.push(ProxCheckLine { name: "prox_l2".into(), max_deviation: worst });

    // Three-branch closed form of l1 - eps*l2.
    for eps in [0.5, 1.0] {
        let mut worst = 0.0f64;
        for _ in 0..n_cases {
            let (x, t) = (draw_x(&mut rng), draw_t(&mut rng));
            let oracle =
                grid_prox_2d(&|a, b| a.abs() + b.abs() - eps * (a * a + b * b).sqrt(), t, &x);
            worst = worst.max(dev(&prox_l1_minus_eps_l2(&x, t, eps), &oracle));
        }
        lines.push(ProxCheckLine {
            name: format!("prox_l1_minus_eps_l2(eps={eps})"),
            max_deviation: worst,
        });
    }

    // Bisection prox on the capped-l1 second component (theta = 2).
    let theta = 2.0;
    let phi = ScalarConvexFn::new(
        move |u: f64| (theta * u.abs() - 1.0).max(0.0),
        move |u: f64| if theta * u.abs() > 1.0 { theta * u.signum() } else { 0.0 },
    );
    let mut worst = 0.0f64;
    for _ in 0..n_cases {
        let x = 3.0 * rng.normal();
        let t = draw_t(&mut rng);
        let got = prox_1d_convex(&phi, t, x).expect("bisection bracket");
        let obj = |y: f64| (theta * y.abs() - 1.0).max(0.0) + (y - x) * (y - x) / (2.0 * t);
        let oracle = grid_argmin_1d(&obj, x, x.abs() + 2.0 * t + 2.0);
        worst = worst.max((got - oracle).abs());
    }
    lines.push(ProxCheckLine { name: "prox_1d_convex(capped_l1 r2)".into(), max_deviation: worst });

    // Prox of the l1 envelope: separable against the explicit Huber form.
    let mut worst = 0.0f64;
    for _ in 0..n_cases {
        let (x, gam) = (draw_x(&mut rng), draw_t(&mut rng));
        let lam = draw_t(&mut rng);
        let got = prox_of_moreau(&L1Norm, lam, gam, &x).expect("closed form");
        let oracle = grid_prox_separable(&|y: f64| huber(y, lam), gam, &x);
        worst = worst.max(dev(&got, &oracle));
    }
    lines.push(ProxCheckLine { name: "prox_of_moreau(l1)".into(), max_deviation: worst });

    // Prox of the l2 envelope: joint 2D against the radial Huber form.
    let mut worst = 0.0f64;
    for _ in 0..n_cases {
        let (x, gam) = (draw_x(&mut rng), draw_t(&mut rng));
        let lam = draw_t(&mut rng);
        let got = prox_of_moreau(&L2Norm, lam, gam, &x).expect("closed form");
        let oracle = grid_prox_2d(&|a, b| l2_envelope((a * a + b * b).sqrt(), lam), gam, &x);
        worst = worst.max(dev(&got, &oracle));
    }
    lines.push(ProxCheckLine { name: "prox_of_moreau(l2)".into(), max_deviation: worst });

    lines
}
