//! Evaluation layer: normalizing constants by quadrature, binned target
//! and sample histograms, binned KL divergence, and moment summaries.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::DiagnosticsError;
use crate::point::Point;
use crate::potentials::DcPotential;
use crate::quadrature::{adaptive_2d, gauss_legendre};

/// Axis-aligned evaluation rectangle.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Box2 {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Box2 {
    pub fn centered(center: &Point, half_width: f64) -> Self {
        assert_eq!(center.dim(), 2);
        Self {
            x: (center[0] - half_width, center[0] + half_width),
            y: (center[1] - half_width, center[1] + half_width),
        }
    }
}

/// Probability mass binned on a rectangular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram2D {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major `(nx, ny)` grid: `mass[i * ny + j]`.
    pub mass: Vec<f64>,
    pub total: f64,
}

impl Histogram2D {
    pub fn nx(&self) -> usize {
        self.x_edges.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y_edges.len() - 1
    }

    pub fn mass_at(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.ny() + j]
    }

    /// CSV rows `x_lo,x_hi,y_lo,y_hi,mass` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x_lo,x_hi,y_lo,y_hi,mass")?;
        for i in 0..self.nx() {
            for j in 0..self.ny() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.x_edges[i],
                    self.x_edges[i + 1],
                    self.y_edges[j],
                    self.y_edges[j + 1],
                    self.mass_at(i, j)
                )?;
            }
        }
        Ok(())
    }
}

fn check_edges(edges: &[f64]) -> Result<(), DiagnosticsError> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DiagnosticsError::BadEdges);
    }
    Ok(())
}

/// Bin edges over `[lo, hi]`. When the interval straddles 0 the edge set
/// contains 0 exactly, with the bin count split proportionally, so bins
/// never straddle the coordinate axes where the catalog regularizers kink.
pub fn grid_edges(lo: f64, hi: f64, n_bins: usize) -> Vec<f64> {
    assert!(hi > lo && n_bins >= 2);
    if lo < 0.0 && hi > 0.0 {
        let frac = (0.0 - lo) / (hi - lo);
        let n_neg = ((n_bins as f64 * frac).round() as usize).clamp(1, n_bins - 1);
        let mut edges = Vec::with_capacity(n_bins + 1);
        for i in 0..n_neg {
            edges.push(lo + (0.0 - lo) * i as f64 / n_neg as f64);
        }
        edges.push(0.0);
        let n_pos = n_bins - n_neg;
        for i in 1..=n_pos {
            edges.push(hi * i as f64 / n_pos as f64);
        }
        edges
    } else {
        (0..=n_bins)
            .map(|i| lo + (hi - lo) * i as f64 / n_bins as f64)
            .collect()
    }
}

/// Normalizing constant `Z = integral of exp(-V)` over the box, by nested
/// adaptive quadrature. Mass outside the box is assumed negligible; choosing
/// a box that covers the target is the caller's responsibility.
pub fn normalize_density(potential: &DcPotential, bounds: Box2, tol: f64) -> Result<f64, DiagnosticsError> {
    if potential.dim() != 2 {
        return Err(DiagnosticsError::NotTwoDimensional { dim: potential.dim() });
    }
    let f = |x: f64, y: f64| (-potential.eval(&Point::from_vec_unchecked(vec![x, y]))).exp();
    adaptive_2d(&f, bounds.x.0, bounds.x.1, bounds.y.0, bounds.y.1, tol)
}

/// Binned target distribution: per-bin mass of `exp(-V)/Z` by a fixed-order
/// tensor Gauss rule, renormalized to sum to one over the grid.
pub fn target_hist(
    potential: &DcPotential,
    z: f64,
    x_edges: &[f64],
    y_edges: &[f64],
    quad_order: usize,
) -> Result<Histogram2D, DiagnosticsError> {
    if potential.dim() != 2 {
        return Err(DiagnosticsError::NotTwoDimensional { dim: potential.dim() });
    }
    assert!(z > 0.0, "normalizing constant must be positive");
    check_edges(x_edges)?;
    check_edges(y_edges)?;
    let (nodes, weights) = gauss_legendre(quad_order);
    let nx = x_edges.len() - 1;
    let ny = y_edges.len() - 1;
    let mut mass = vec![0.0; nx * ny];
    for i in 0..nx {
        let (ax, bx) = (x_edges[i], x_edges[i + 1]);
        let (hx, mx) = (0.5 * (bx - ax), 0.5 * (ax + bx));
        for j in 0..ny {
            let (ay, by) = (y_edges[j], y_edges[j + 1]);
            let (hy, my) = (0.5 * (by - ay), 0.5 * (ay + by));
            let mut acc = 0.0;
            for (xi, wx) in nodes.iter().zip(&weights) {
                let x = mx + hx * xi;
                for (yj, wy) in nodes.iter().zip(&weights) {
                    let y = my + hy * yj;
                    acc += wx * wy * (-potential.eval(&Point::from_vec_unchecked(vec![x, y]))).exp();
                }
            }
            mass[i * ny + j] = acc * hx * hy / z;
        }
    }
    let total: f64 = mass.iter().sum();
    for m in &mut mass {
        *m /= total;
    }
    let renorm: f64 = mass.iter().sum();
    Ok(Histogram2D {
        x_edges: x_edges.to_vec(),
        y_edges: y_edges.to_vec(),
        mass,
        total: renorm,
    })
}

fn bin_index(edges: &[f64], v: f64) -> Option<usize> {
    let n = edges.len() - 1;
    if v < edges[0] || v > edges[n] {
        return None;
    }
    if v == edges[n] {
        // Closed last bin.
        return Some(n - 1);
    }
    let idx = edges.partition_point(|&e| e <= v) - 1;
    Some(idx.min(n - 1))
}

/// Empirical histogram of samples; mass is `count / n_inside`. Samples that
/// fall outside the grid are counted separately and reported.
pub fn histogram2d(
    samples: &[Point],
    x_edges: &[f64],
    y_edges: &[f64],
) -> Result<(Histogram2D, usize), DiagnosticsError> {
    check_edges(x_edges)?;
    check_edges(y_edges)?;
    if samples.is_empty() {
        return Err(DiagnosticsError::EmptySamples);
    }
    let nx = x_edges.len() - 1;
    let ny = y_edges.len() - 1;
    let mut counts = vec![0u64; nx * ny];
    let mut outside = 0usize;
    for s in samples {
        assert_eq!(s.dim(), 2, "histogram2d expects 2-dimensional samples");
        match (bin_index(x_edges, s[0]), bin_index(y_edges, s[1])) {
            (Some(i), Some(j)) => counts[i * ny + j] += 1,
            _ => outside += 1,
        }
    }
    let inside = samples.len() - outside;
    if inside == 0 {
        return Err(DiagnosticsError::EmptySamples);
    }
    let mass: Vec<f64> = counts.iter().map(|&c| c as f64 / inside as f64).collect();
    let total = mass.iter().sum();
    Ok((
        Histogram2D {
            x_edges: x_edges.to_vec(),
            y_edges: y_edges.to_vec(),
            mass,
            total,
        },
        outside,
    ))
}

/// Floor applied to the reference mass inside the logarithm.
pub const KL_FLOOR: f64 = 1e-12;

/// Binned KL divergence `sum_i p_i log(p_i / max(q_i, 1e-12))` over bins
/// with `p_i > 0` (so `0 log 0 = 0`). Requires identical edges and
/// normalized inputs.
pub fn binned_kl(p: &Histogram2D, q: &Histogram2D) -> Result<f64, DiagnosticsError> {
    if p.x_edges != q.x_edges || p.y_edges != q.y_edges {
        return Err(DiagnosticsError::EdgeMismatch);
    }
    for h in [p, q] {
        if (h.total - 1.0).abs() > 1e-9 {
            return Err(DiagnosticsError::NotNormalized { total: h.total });
        }
    }
    let mut kl = 0.0;
    for (pi, qi) in p.mass.iter().zip(&q.mass) {
        if *pi > 0.0 {
            kl += pi * (pi / qi.max(KL_FLOOR)).ln();
        }
    }
    Ok(kl)
}

/// Empirical mean and unbiased covariance of the samples.
pub fn sample_moments(samples: &[Point]) -> Result<(Point, DMatrix<f64>), DiagnosticsError> {
    if samples.len() < 2 {
        return Err(DiagnosticsError::TooFewSamples { got: samples.len() });
    }
    let n = samples.len();
    let d = samples[0].dim();
    let mut mean = vec![0.0; d];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s.as_slice()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = DMatrix::zeros(d, d);
    for s in samples {
        for i in 0..d {
            let di = s[i] - mean[i];
            for j in 0..d {
                cov[(i, j)] += di * (s[j] - mean[j]);
            }
        }
    }
    cov /= (n - 1) as f64;
    Ok((Point::from_vec_unchecked(mean), cov))
}
