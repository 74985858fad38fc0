//! Search of the whole `λ` box for the most negative regularized
//! determinant, and the negativity depth derived from it.
//!
//! The raw determinant is unbounded below near `λᵢ = 0` whenever it is
//! negative nearby, so the search runs on `Σ_reg`, which is a polynomial on
//! the closed box and has the same sign wherever both are defined. Depth is
//! an ordinal indicator: it is only comparable between states with the same
//! mode count.

use std::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gaussian::CovarianceMatrix;
use crate::nelder_mead::{compare_points, minimize_boxed, NelderMeadOptions};
use crate::scaling::{
    minor_report, regularized_determinant, regularized_minors, MinorReport, ScalingVector,
};
use crate::scan::grid_coordinate;
use crate::{Error, Result, PHYSICALITY_TOL, WITNESS_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EntangledWitnessed,
    NotWitnessed,
    /// Only for two modes, where the partial transpose test is exact.
    Separable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::EntangledWitnessed => "entangled-witnessed",
            Verdict::NotWitnessed => "not-witnessed",
            Verdict::Separable => "separable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Points per axis of the coarse pre-scan that seeds the local searches.
    pub grid: usize,
    pub starts: usize,
    pub seed: u64,
    pub witness_tol: f64,
    pub physicality_tol: f64,
    /// Simplex diameter at which a local search stops.
    pub xtol: f64,
    /// Upper bound on coarse-grid nodes; the grid is thinned for many modes.
    pub max_coarse_nodes: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            grid: 11,
            starts: 32,
            seed: 1,
            witness_tol: WITNESS_TOL,
            physicality_tol: PHYSICALITY_TOL,
            xtol: 1e-8,
            max_coarse_nodes: 250_000,
        }
    }
}

impl MinimizeOptions {
    /// Points per axis actually used for `modes` modes.
    pub fn effective_grid(&self, modes: usize) -> usize {
        let mut k = self.grid;
        while k > 2
            && k.checked_pow(modes as u32)
                .is_none_or(|total| total > self.max_coarse_nodes)
        {
            k -= 1;
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub verdict: Verdict,
    pub best_lambda: ScalingVector,
    /// `Σ_reg` at `best_lambda`.
    pub best_value: f64,
    /// `max(0, -best_value)`.
    pub depth: f64,
    /// Raw minors at `best_lambda`; absent when some `λᵢ` is zero there.
    pub minors: Option<MinorReport>,
    /// Regularized minors of orders `n+1 … 2n` at `best_lambda`.
    pub regularized_minors: Vec<f64>,
    pub coarse_best: f64,
    pub coarse_grid: usize,
    pub evaluations: usize,
}

fn coarse_nodes(modes: usize, points: usize) -> impl ParallelIterator<Item = Vec<f64>> {
    let total = points.pow(modes as u32);
    (0..total).into_par_iter().map(move |mut idx| {
        let mut l = vec![0.0; modes];
        for k in (0..modes).rev() {
            l[k] = grid_coordinate(idx % points, points);
            idx /= points;
        }
        l
    })
}

/// Multi-start simplex search for the minimum of `Σ_reg` over `[-1, 1]ⁿ`.
///
/// The best `starts` nodes of a coarse grid seed independent local
/// searches; the result is the best point found, so its value never exceeds
/// the coarse minimum. The outcome depends only on `sigma` and `opts`.
pub fn minimize_negativity(
    sigma: &CovarianceMatrix,
    opts: &MinimizeOptions,
) -> Result<WitnessResult> {
    if opts.starts == 0 {
        return Err(Error::Options("starts must be at least 1".into()));
    }
    if opts.grid < 2 {
        return Err(Error::Options(
            "grid must have at least 2 points per axis".into(),
        ));
    }
    sigma.require_physical(opts.physicality_tol)?;

    let n = sigma.modes();
    let points = opts.effective_grid(n);
    let eval = |l: &[f64]| regularized_determinant(sigma, &ScalingVector::new(l.to_vec())?);

    let mut coarse = coarse_nodes(n, points)
        .map(|l| eval(&l).map(|v| (v, l)))
        .collect::<Result<Vec<_>>>()?;
    coarse.par_sort_by(|a, b| compare_points((a.0, &a.1), (b.0, &b.1)));
    coarse.truncate(opts.starts);
    let coarse_best = coarse[0].0;
    let mut evaluations = points.pow(n as u32);

    let nm = NelderMeadOptions {
        xtol: opts.xtol,
        ..NelderMeadOptions::default()
    };
    let lower = vec![-1.0; n];
    let upper = vec![1.0; n];
    let runs = coarse
        .par_iter()
        .enumerate()
        .map(|(start, (_, x0))| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(start as u64);
            let signs: Vec<f64> = (0..n)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let failure = RefCell::new(None);
            let objective = |l: &[f64]| match eval(l) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            let m = minimize_boxed(objective, x0, &lower, &upper, &signs, &nm);
            match failure.into_inner() {
                Some(e) => Err(e),
                None => Ok(m),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = (coarse[0].0, coarse[0].1.clone());
    for m in &runs {
        evaluations += m.evals;
        if compare_points((m.value, &m.x), (best.0, &best.1)).is_lt() {
            best = (m.value, m.x.clone());
        }
    }

    // Local searches stop a few xtol away from exact grid values such as
    // λᵢ = 0; move onto them when that does not make the value worse.
    let snap_radius = (opts.xtol * 100.0).max(1e-6);
    for k in 0..n {
        let step = 2.0 / (points - 1) as f64;
        let i = ((best.1[k] + 1.0) / step).round() as usize;
        let target = grid_coordinate(i.min(points - 1), points);
        if target != best.1[k] && (target - best.1[k]).abs() <= snap_radius {
            let mut trial = best.1.clone();
            trial[k] = target;
            let v = eval(&trial)?;
            evaluations += 1;
            if v <= best.0 {
                best = (v, trial);
            }
        }
    }

    let best_lambda = ScalingVector::new(best.1)?;
    let depth = (-best.0).max(0.0);
    let verdict = if depth > opts.witness_tol {
        Verdict::EntangledWitnessed
    } else if n == 2 {
        Verdict::Separable
    } else {
        Verdict::NotWitnessed
    };
    let minors = if best_lambda.has_zero() {
        None
    } else {
        Some(minor_report(sigma, &best_lambda, opts.witness_tol)?)
    };
    Ok(WitnessResult {
        verdict,
        regularized_minors: regularized_minors(sigma, &best_lambda)?,
        best_lambda,
        best_value: best.0,
        depth,
        minors,
        coarse_best,
        coarse_grid: points,
        evaluations,
    })
}

/// Depth `max(0, -min Σ_reg)` with the default search parameters.
pub fn negativity_depth(sigma: &CovarianceMatrix) -> Result<f64> {
    Ok(minimize_negativity(sigma, &MinimizeOptions::default())?.depth)
}
