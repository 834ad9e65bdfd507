//! Tensor-product grid quadrature and sampled-data integration rules.
//!
//! Grid sums are parallel over the outermost axis. Each slice is accumulated
//! with compensated summation and slices are combined in index order, so the
//! result does not depend on the thread count.

use rayon::prelude::*;

use crate::linalg::CompensatedSum;
use crate::{Error, Result};

/// Per-cell rule of a 1D grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    /// One node at each cell center.
    #[default]
    Midpoint,
    /// Two Gauss-Legendre nodes per cell.
    GaussLegendre2,
}

/// `n` equal cells on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
    pub rule: Rule,
}

impl Axis {
    pub fn midpoint(lo: f64, hi: f64, cells: usize) -> Self {
        Self {
            lo,
            hi,
            cells,
            rule: Rule::Midpoint,
        }
    }

    pub fn gauss2(lo: f64, hi: f64, cells: usize) -> Self {
        Self {
            lo,
            hi,
            cells,
            rule: Rule::GaussLegendre2,
        }
    }

    /// Node positions and weights.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let h = (self.hi - self.lo) / self.cells as f64;
        let mut out = Vec::with_capacity(self.cells * 2);
        for k in 0..self.cells {
            let center = self.lo + (k as f64 + 0.5) * h;
            match self.rule {
                Rule::Midpoint => out.push((center, h)),
                Rule::GaussLegendre2 => {
                    let offset = 0.5 * h / 3f64.sqrt();
                    out.push((center - offset, 0.5 * h));
                    out.push((center + offset, 0.5 * h));
                }
            }
        }
        out
    }
}

/// Integrates `f` over the product of `axes`.
pub fn integrate<F>(axes: &[Axis], f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(!axes.is_empty(), "need at least one axis");
    let nodes: Vec<Vec<(f64, f64)>> = axes.iter().map(Axis::nodes).collect();
    let (outer, inner) = nodes.split_first().expect("non-empty");
    let slices: Vec<f64> = outer
        .par_iter()
        .map(|&(x0, w0)| {
            let mut point = vec![0.0; axes.len()];
            point[0] = x0;
            let mut sum = CompensatedSum::new();
            accumulate(inner, 1, w0, &mut point, &f, &mut sum);
            sum.value()
        })
        .collect();
    slices.into_iter().collect::<CompensatedSum>().value()
}

fn accumulate<F>(rest: &[Vec<(f64, f64)>], depth: usize, weight: f64, point: &mut [f64], f: &F, sum: &mut CompensatedSum)
where
    F: Fn(&[f64]) -> f64,
{
    match rest.split_first() {
        None => sum.add(weight * f(point)),
        Some((axis, tail)) => {
            for &(x, w) in axis {
                point[depth] = x;
                accumulate(tail, depth + 1, weight * w, point, f, sum);
            }
        }
    }
}

/// Composite Simpson rule on possibly unequal sample spacing. An odd number
/// of intervals closes with a three-point rule on the last interval.
pub fn simpson(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            actual: values.len(),
        });
    }
    let n = times.len();
    match n {
        0 | 1 => {
            return Err(Error::TooFewSamples { needed: 2, actual: n });
        }
        2 => return Ok(0.5 * (times[1] - times[0]) * (values[0] + values[1])),
        _ => {}
    }
    let mut sum = CompensatedSum::new();
    let intervals = n - 1;
    let mut k = 0;
    while k + 2 <= intervals {
        sum.add(simpson_pair(&times[k..k + 3], &values[k..k + 3]));
        k += 2;
    }
    if k < intervals {
        sum.add(last_interval(&times[n - 3..], &values[n - 3..]));
    }
    Ok(sum.value())
}

/// Exact integral over `[t0, t2]` of the quadratic through three samples.
pub fn simpson_pair(t: &[f64], f: &[f64]) -> f64 {
    let h0 = t[1] - t[0];
    let h1 = t[2] - t[1];
    let l = h0 + h1;
    l / 6.0 * ((2.0 - h1 / h0) * f[0] + l * l / (h0 * h1) * f[1] + (2.0 - h0 / h1) * f[2])
}

/// Integral over `[t1, t2]` of the quadratic through three samples.
fn last_interval(t: &[f64], f: &[f64]) -> f64 {
    let h0 = t[1] - t[0];
    let h1 = t[2] - t[1];
    // Lagrange weights integrated over [t1, t2].
    let w0 = -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    let w1 = h1 * (h1 + 3.0 * h0) / (6.0 * h0);
    let w2 = h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
    w0 * f[0] + w1 * f[1] + w2 * f[2]
}
