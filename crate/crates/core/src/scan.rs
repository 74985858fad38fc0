//! Dense grids over two-dimensional slices of the `λ` box.

use rayon::prelude::*;

use crate::gaussian::CovarianceMatrix;
use crate::scaling::{regularized_determinant, shifted_determinant, ScalingVector};
use crate::{Error, Result, WITNESS_TOL};

pub const DEFAULT_RESOLUTION: usize = 101;

/// Grid coordinate `i` of `points` evenly spaced nodes on `[-1, 1]`.
///
/// Written as `-1 + 2i/(points-1)` so that a coarse grid whose spacing is an
/// integer multiple of a finer one lands on bit-identical coordinates.
pub fn grid_coordinate(i: usize, points: usize) -> f64 {
    -1.0 + (2 * i) as f64 / (points - 1) as f64
}

/// Two free axes, every other `λᵢ` pinned.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicePlan {
    axes: (usize, usize),
    base: Vec<f64>,
    resolution: usize,
}

impl SlicePlan {
    /// `axes` and the mode indices in `fixed` are 1-based. Every mode that is
    /// not a free axis needs exactly one fixed value.
    pub fn new(
        modes: usize,
        axes: (usize, usize),
        fixed: &[(usize, f64)],
        resolution: usize,
    ) -> Result<Self> {
        let (a, b) = axes;
        if modes < 2 {
            return Err(Error::Plan("a slice needs at least two modes".into()));
        }
        if a == b || a == 0 || b == 0 || a > modes || b > modes {
            return Err(Error::Plan(format!(
                "axes ({a},{b}) must be distinct modes in 1..={modes}"
            )));
        }
        if resolution < 2 {
            return Err(Error::Plan(format!("resolution {resolution} is below 2")));
        }
        let mut base: Vec<Option<f64>> = vec![None; modes];
        base[a - 1] = Some(0.0);
        base[b - 1] = Some(0.0);
        for &(mode, value) in fixed {
            if mode == 0 || mode > modes {
                return Err(Error::Plan(format!(
                    "fixed mode {mode} is outside 1..={modes}"
                )));
            }
            if mode == a || mode == b {
                return Err(Error::Plan(format!(
                    "mode {mode} is a free axis and cannot be fixed"
                )));
            }
            if base[mode - 1].is_some() {
                return Err(Error::Plan(format!("mode {mode} is fixed twice")));
            }
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::LambdaOutOfRange {
                    index: mode - 1,
                    value,
                });
            }
            base[mode - 1] = Some(value);
        }
        let base = base
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| Error::Plan(format!("mode {} has no fixed value", k + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            axes,
            base,
            resolution,
        })
    }

    pub fn modes(&self) -> usize {
        self.base.len()
    }

    pub fn axes(&self) -> (usize, usize) {
        self.axes
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Fixed value of a non-axis mode (1-based).
    pub fn fixed(&self, mode: usize) -> Option<f64> {
        (mode != self.axes.0 && mode != self.axes.1).then(|| self.base[mode - 1])
    }

    /// Full `λ` at grid node `(i, j)`: `i` indexes the first axis.
    pub fn lambda_at(&self, i: usize, j: usize) -> Vec<f64> {
        let mut l = self.base.clone();
        l[self.axes.0 - 1] = grid_coordinate(i, self.resolution);
        l[self.axes.1 - 1] = grid_coordinate(j, self.resolution);
        l
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSummary {
    pub min_regularized: f64,
    /// Grid index `(i, j)` of the minimum; ties go to the first in row-major
    /// order.
    pub argmin: (usize, usize),
    pub max_regularized: f64,
    /// Fraction of nodes with `Σ_reg < -tol`.
    pub negative_fraction: f64,
    pub tol: f64,
}

/// Raw and regularized determinants on every node of a slice, row-major with
/// the first axis outer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub plan: SlicePlan,
    /// `None` where some `λᵢ = 0` and the raw determinant is undefined.
    pub raw: Vec<Option<f64>>,
    pub regularized: Vec<f64>,
    pub summary: ScanSummary,
}

impl ScanGrid {
    pub fn resolution(&self) -> usize {
        self.plan.resolution
    }

    pub fn regularized_at(&self, i: usize, j: usize) -> f64 {
        self.regularized[i * self.plan.resolution + j]
    }

    pub fn raw_at(&self, i: usize, j: usize) -> Option<f64> {
        self.raw[i * self.plan.resolution + j]
    }
}

pub fn scan_slice(sigma: &CovarianceMatrix, plan: &SlicePlan) -> Result<ScanGrid> {
    if plan.modes() != sigma.modes() {
        return Err(Error::Dimension {
            expected: sigma.modes(),
            found: plan.modes(),
        });
    }
    let res = plan.resolution;
    let nodes = (0..res * res)
        .into_par_iter()
        .map(|idx| {
            let lambda = ScalingVector::new(plan.lambda_at(idx / res, idx % res))?;
            let reg = regularized_determinant(sigma, &lambda)?;
            let raw = if lambda.has_zero() {
                None
            } else {
                Some(shifted_determinant(sigma, &lambda)?)
            };
            Ok((raw, reg))
        })
        .collect::<Result<Vec<_>>>()?;
    let (raw, regularized): (Vec<_>, Vec<_>) = nodes.into_iter().unzip();

    let mut argmin = 0;
    for (k, &v) in regularized.iter().enumerate() {
        if v < regularized[argmin] {
            argmin = k;
        }
    }
    let tol = WITNESS_TOL;
    let negative = regularized.iter().filter(|&&v| v < -tol).count();
    let summary = ScanSummary {
        min_regularized: regularized[argmin],
        argmin: (argmin / res, argmin % res),
        max_regularized: regularized
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
        negative_fraction: negative as f64 / regularized.len() as f64,
        tol,
    };
    Ok(ScanGrid {
        plan: plan.clone(),
        raw,
        regularized,
        summary,
    })
}
