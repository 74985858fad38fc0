//! Partial scaling of momentum quadratures and the shifted minors that
//! make up the separability test.
//!
//! Scaling `pᵢ → λᵢ pᵢ` turns `σ` into `σ_λ = D σ D` with
//! `D = diag(1, …, 1, 1/λ₁, …, 1/λₙ)`. A separable state stays physical, so
//! every leading principal minor of `σ_λ + (i/2)Ω` of order `n+1 … 2n` must
//! be nonnegative; the first `n` minors only involve the position block and
//! never change.
//!
//! Because `D Ω_Λ D = Ω` with `Ω_Λ = [[0, -Λ], [Λ, 0]]`,
//!
//! ```text
//! det(σ + (i/2)Ω_Λ) = (Π λᵢ²) · det(σ_λ + (i/2)Ω)
//! ```
//!
//! The left-hand side, the *regularized* determinant, is a polynomial in `λ`
//! and stays finite on the whole closed box, while the raw determinant blows
//! up as any `λᵢ → 0`. Both are computed here by independent routes.

use serde::{Deserialize, Serialize};

use crate::gaussian::{CovarianceMatrix, SymplecticShift};
use crate::linalg::hermitian_leading_det;
use crate::{Error, Result};

/// Partial-scaling parameters, one per mode, each in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScalingVector(Vec<f64>);

impl ScalingVector {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        for (index, &value) in lambdas.iter().enumerate() {
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::LambdaOutOfRange { index, value });
            }
        }
        Ok(Self(lambdas))
    }

    pub fn ones(modes: usize) -> Self {
        Self(vec![1.0; modes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `Π λᵢ²`, the factor linking raw and regularized determinants.
    pub fn product_sq(&self) -> f64 {
        self.0.iter().map(|l| l * l).product()
    }

    /// Index of the first zero entry among the first `count`.
    pub fn first_zero(&self, count: usize) -> Option<usize> {
        self.0.iter().take(count).position(|&l| l == 0.0)
    }

    pub fn has_zero(&self) -> bool {
        self.first_zero(self.0.len()).is_some()
    }
}

impl TryFrom<Vec<f64>> for ScalingVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ScalingVector> for Vec<f64> {
    fn from(v: ScalingVector) -> Self {
        v.0
    }
}

fn check_len(sigma: &CovarianceMatrix, lambda: &ScalingVector) -> Result<()> {
    if lambda.len() != sigma.modes() {
        return Err(Error::Dimension {
            expected: sigma.modes(),
            found: lambda.len(),
        });
    }
    Ok(())
}

fn check_nonzero(lambda: &ScalingVector, count: usize) -> Result<()> {
    match lambda.first_zero(count) {
        Some(index) => Err(Error::ZeroLambda { index }),
        None => Ok(()),
    }
}

/// `σ_λ`: position block unchanged, `qᵢpⱼ` divided by `λⱼ`, `pᵢpⱼ` divided
/// by `λᵢλⱼ`.
pub fn scale_covariance(
    sigma: &CovarianceMatrix,
    lambda: &ScalingVector,
) -> Result<CovarianceMatrix> {
    check_len(sigma, lambda)?;
    check_nonzero(lambda, lambda.len())?;
    Ok(scale_unchecked(sigma, lambda.as_slice()))
}

fn scale_unchecked(sigma: &CovarianceMatrix, lambdas: &[f64]) -> CovarianceMatrix {
    let n = sigma.modes();
    let factor = |k: usize| if k < n { 1.0 } else { lambdas[k - n] };
    let src = sigma.entries();
    let entries =
        nalgebra::DMatrix::from_fn(2 * n, 2 * n, |r, c| src[(r, c)] / (factor(r) * factor(c)));
    CovarianceMatrix::new(n, entries).expect("scaling preserves symmetry")
}

/// Raw leading minor of `σ_λ + (i/2)Ω` without argument checks. Entries of
/// `λ` past `order - n` do not enter the leading block and are replaced by 1.
fn raw_minor(sigma: &CovarianceMatrix, lambda: &ScalingVector, order: usize) -> Result<f64> {
    let n = sigma.modes();
    let k = order - n;
    let mut lambdas = lambda.as_slice().to_vec();
    for l in lambdas.iter_mut().skip(k) {
        *l = 1.0;
    }
    let scaled = scale_unchecked(sigma, &lambdas);
    let m = scaled.shifted(&SymplecticShift::standard(n));
    hermitian_leading_det(&m, order)
}

fn check_order(sigma: &CovarianceMatrix, order: usize) -> Result<()> {
    let n = sigma.modes();
    if order <= n || order > 2 * n {
        return Err(Error::MinorOrder {
            order,
            min: n + 1,
            max: 2 * n,
        });
    }
    Ok(())
}

/// `Σ(λ) = det(σ_λ + (i/2)Ω)`; undefined when any `λᵢ = 0`.
pub fn shifted_determinant(sigma: &CovarianceMatrix, lambda: &ScalingVector) -> Result<f64> {
    shifted_minor(sigma, lambda, sigma.dim())
}

/// `Σ_reg(λ) = det(σ + (i/2)Ω_Λ) = (Π λᵢ²)·Σ(λ)`, defined on the closed box.
pub fn regularized_determinant(sigma: &CovarianceMatrix, lambda: &ScalingVector) -> Result<f64> {
    regularized_minor(sigma, lambda, sigma.dim())
}

/// Leading principal minor of `σ_λ + (i/2)Ω` of the given order
/// (`n+1 ≤ order ≤ 2n`). Only `λ₁ … λ_{order-n}` enter it.
pub fn shifted_minor(
    sigma: &CovarianceMatrix,
    lambda: &ScalingVector,
    order: usize,
) -> Result<f64> {
    check_len(sigma, lambda)?;
    check_order(sigma, order)?;
    check_nonzero(lambda, order - sigma.modes())?;
    raw_minor(sigma, lambda, order)
}

/// Leading principal minor of `σ + (i/2)Ω_Λ`; equals
/// `Π_{i ≤ order-n} λᵢ²` times [`shifted_minor`].
pub fn regularized_minor(
    sigma: &CovarianceMatrix,
    lambda: &ScalingVector,
    order: usize,
) -> Result<f64> {
    check_len(sigma, lambda)?;
    check_order(sigma, order)?;
    let m = sigma.shifted(&SymplecticShift::scaled(lambda.as_slice()));
    hermitian_leading_det(&m, order)
}

/// Shifted minors of orders `n+1 … 2n` at one point of the `λ` box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorReport {
    pub lambda: ScalingVector,
    /// `minors[k]` is the minor of order `n + 1 + k`.
    pub minors: Vec<f64>,
    pub tol: f64,
    pub witnessed: bool,
}

impl MinorReport {
    pub fn first_order(&self) -> usize {
        self.lambda.len() + 1
    }

    pub fn full_determinant(&self) -> f64 {
        *self.minors.last().expect("at least one minor")
    }

    pub fn most_negative(&self) -> f64 {
        self.minors.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn minor_report(
    sigma: &CovarianceMatrix,
    lambda: &ScalingVector,
    tol: f64,
) -> Result<MinorReport> {
    check_len(sigma, lambda)?;
    check_nonzero(lambda, lambda.len())?;
    let n = sigma.modes();
    let minors = ((n + 1)..=(2 * n))
        .map(|order| raw_minor(sigma, lambda, order))
        .collect::<Result<Vec<_>>>()?;
    let witnessed = minors.iter().any(|&m| m < -tol);
    Ok(MinorReport {
        lambda: lambda.clone(),
        minors,
        tol,
        witnessed,
    })
}

/// Regularized minors of orders `n+1 … 2n`; defined for every `λ` in the box.
pub fn regularized_minors(sigma: &CovarianceMatrix, lambda: &ScalingVector) -> Result<Vec<f64>> {
    check_len(sigma, lambda)?;
    let n = sigma.modes();
    let m = sigma.shifted(&SymplecticShift::scaled(lambda.as_slice()));
    ((n + 1)..=(2 * n))
        .map(|order| hermitian_leading_det(&m, order))
        .collect()
}

/// Partial transpose test result.
#[derive(Debug, Clone, PartialEq)]
pub struct PptReport {
    pub report: MinorReport,
    /// Two-mode only: the test is necessary and sufficient there.
    pub separable: Option<bool>,
}

/// `+1` on the first mode, `-1` on all others.
pub fn default_ppt_pattern(modes: usize) -> Vec<f64> {
    (0..modes)
        .map(|k| if k == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Minor report at a pure sign pattern `λᵢ ∈ {+1, -1}`.
pub fn ppt_test(sigma: &CovarianceMatrix, pattern: &[f64], tol: f64) -> Result<PptReport> {
    for (index, &value) in pattern.iter().enumerate() {
        if value != 1.0 && value != -1.0 {
            return Err(Error::Pattern { index, value });
        }
    }
    let lambda = ScalingVector::new(pattern.to_vec())?;
    let report = minor_report(sigma, &lambda, tol)?;
    let separable = (sigma.modes() == 2).then_some(!report.witnessed);
    Ok(PptReport { report, separable })
}
