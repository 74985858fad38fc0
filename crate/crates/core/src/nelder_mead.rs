//! Nelder–Mead simplex descent restricted to an axis-aligned box.
//!
//! Every trial point is projected onto the box before it is evaluated, so
//! the objective is never called outside the bounds. A converged run is
//! restarted from its best vertex with a fresh simplex, which recovers from
//! simplices that collapsed against a face of the box.

use std::cmp::Ordering;

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
    /// Stop when every vertex is within this distance (max-norm) of the best.
    pub xtol: f64,
    pub max_evals: usize,
    pub restarts: usize,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            xtol: 1e-8,
            max_evals: 20_000,
            restarts: 3,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Orders by value, then lexicographically by position. NaN sorts last.
pub fn compare_points(a: (f64, &[f64]), b: (f64, &[f64])) -> Ordering {
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    key(a.0).total_cmp(&key(b.0)).then_with(|| {
        a.1.iter()
            .zip(b.1)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

struct Boxed<'a, F> {
    f: F,
    lower: &'a [f64],
    upper: &'a [f64],
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Boxed<'_, F> {
    fn project(&self, x: &mut [f64]) {
        for (k, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[k], self.upper[k]);
        }
    }

    fn eval(&mut self, mut x: Vec<f64>) -> (Vec<f64>, f64) {
        self.project(&mut x);
        self.evals += 1;
        let v = (self.f)(&x);
        (x, if v.is_nan() { f64::INFINITY } else { v })
    }
}

/// Minimizes `f` over `[lower, upper]` starting from `x0`.
///
/// `signs[k]` picks the direction of the initial simplex edge along axis
/// `k`; it is flipped automatically when that edge would leave the box.
pub fn minimize_boxed<F>(
    f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    signs: &[f64],
    opts: &NelderMeadOptions,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(lower.len() == dim && upper.len() == dim && signs.len() == dim);
    let mut ctx = Boxed {
        f,
        lower,
        upper,
        evals: 0,
    };
    let mut best = ctx.eval(x0.to_vec());
    let mut converged = false;

    for _ in 0..=opts.restarts {
        let (x, v, ok) = run_simplex(&mut ctx, &best, signs, opts);
        converged = ok;
        let improved = v < best.1;
        if compare_points((v, &x), (best.1, &best.0)).is_lt() {
            best = (x, v);
        }
        if !improved || ctx.evals >= opts.max_evals {
            break;
        }
    }

    Minimum {
        x: best.0,
        value: best.1,
        evals: ctx.evals,
        converged,
    }
}

fn run_simplex<F: FnMut(&[f64]) -> f64>(
    ctx: &mut Boxed<'_, F>,
    start: &(Vec<f64>, f64),
    signs: &[f64],
    opts: &NelderMeadOptions,
) -> (Vec<f64>, f64, bool) {
    let dim = start.0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push(start.clone());
    for k in 0..dim {
        let mut x = start.0.clone();
        let mut step = opts.initial_step * if signs[k] < 0.0 { -1.0 } else { 1.0 };
        if x[k] + step > ctx.upper[k] || x[k] + step < ctx.lower[k] {
            step = -step;
        }
        x[k] += step;
        simplex.push(ctx.eval(x));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| compare_points((a.1, &a.0), (b.1, &b.0)));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter < opts.xtol {
            converged = true;
            break;
        }
        if ctx.evals >= opts.max_evals {
            break;
        }

        let worst = dim;
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..worst] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
            from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
        };

        let reflected = ctx.eval(along(&centroid, &simplex[worst].0, -opts.reflection));
        if reflected.1 < simplex[0].1 {
            let expanded = ctx.eval(along(&centroid, &reflected.0, opts.expansion));
            simplex[worst] = if expanded.1 < reflected.1 {
                expanded
            } else {
                reflected
            };
            continue;
        }
        if reflected.1 < simplex[worst - 1].1 {
            simplex[worst] = reflected;
            continue;
        }
        let contracted = if reflected.1 < simplex[worst].1 {
            let c = ctx.eval(along(&centroid, &reflected.0, opts.contraction));
            (c.1 <= reflected.1).then_some(c)
        } else {
            let c = ctx.eval(along(&centroid, &simplex[worst].0, opts.contraction));
            (c.1 < simplex[worst].1).then_some(c)
        };
        match contracted {
            Some(c) => simplex[worst] = c,
            None => {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    *vertex = ctx.eval(along(&anchor, &vertex.0, opts.shrink));
                }
            }
        }
    }
    let (x, v) = simplex.swap_remove(0);
    (x, v, converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], lo: f64, hi: f64) -> Minimum {
        let n = x0.len();
        minimize_boxed(
            f,
            x0,
            &vec![lo; n],
            &vec![hi; n],
            &vec![1.0; n],
            &NelderMeadOptions::default(),
        )
    }

    #[test]
    fn finds_interior_minimum() {
        let m = run(
            |x| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.2).powi(2),
            &[0.9, 0.9],
            -1.0,
            1.0,
        );
        assert!(m.converged);
        assert!((m.x[0] - 0.3).abs() < 1e-6 && (m.x[1] + 0.2).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let m = run(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-0.5, 0.5],
            -2.0,
            2.0,
        );
        assert!(m.value < 1e-10, "{m:?}");
    }

    #[test]
    fn stops_on_the_boundary() {
        // Unconstrained minimum at (2, -3).
        let m = run(
            |x| (x[0] - 2.0).powi(2) + (x[1] + 3.0).powi(2),
            &[0.0, 0.0],
            -1.0,
            1.0,
        );
        assert!(
            (m.x[0] - 1.0).abs() < 1e-7 && (m.x[1] + 1.0).abs() < 1e-7,
            "{m:?}"
        );
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x.iter().map(|v| (3.0 * v).sin()).sum::<f64>();
        let x0 = [0.2, -0.7, 0.4];
        let m = run(f, &x0, -1.0, 1.0);
        assert!(m.value <= f(&x0));
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] * x[1] - 0.1).powi(2) + x[2].cos();
        let a = run(f, &[0.5, 0.5, 0.5], -1.0, 1.0);
        let b = run(f, &[0.5, 0.5, 0.5], -1.0, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn tie_break_is_lexicographic() {
        assert!(compare_points((1.0, &[0.0, 1.0]), (1.0, &[0.5, -1.0])).is_lt());
        assert!(compare_points((f64::NAN, &[0.0]), (1.0, &[0.0])).is_gt());
    }
}
