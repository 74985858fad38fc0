//! Covariance matrices of pure and mixed multimode Gaussian states.
//!
//! Quadratures are always ordered `(q₁, …, qₙ, p₁, …, pₙ)` and measured in
//! units with ħ = 1, so the vacuum covariance is `½·I`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg;
use crate::{AdmissibilityError, Error, Result, MAX_MODES};

/// Threshold on the smallest eigenvalue of the exponent matrix below which
/// a pure-state spec is rejected as not positive definite.
pub const POSITIVE_DEFINITE_TOL: f64 = 1e-12;

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::ModeCount {
            found: modes,
            max: MAX_MODES,
        });
    }
    Ok(())
}

/// A pure Gaussian state with wavefunction
/// `N·exp(-½ Σ xᵢ² + Σ_{i<j} c_ij xᵢ xⱼ)`.
///
/// Mode indices are 1-based, matching the state-file format.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateSpec {
    modes: usize,
    couplings: BTreeMap<(usize, usize), f64>,
}

impl PureStateSpec {
    /// Uncoupled `modes`-mode vacuum.
    pub fn new(modes: usize) -> Result<Self> {
        check_modes(modes)?;
        Ok(Self {
            modes,
            couplings: BTreeMap::new(),
        })
    }

    pub fn with_coupling(mut self, i: usize, j: usize, value: f64) -> Result<Self> {
        self.set_coupling(i, j, value)?;
        Ok(self)
    }

    /// Sets `c_ij` for the unordered pair `{i, j}`.
    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if lo == 0 || lo == hi || hi > self.modes {
            return Err(Error::CouplingIndex {
                i,
                j,
                modes: self.modes,
            });
        }
        if value == 0.0 {
            self.couplings.remove(&(lo, hi));
        } else {
            self.couplings.insert((lo, hi), value);
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.couplings.get(&key).copied().unwrap_or(0.0)
    }

    /// Non-zero couplings keyed by `(i, j)` with `i < j`.
    pub fn couplings(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.couplings.iter().map(|(&k, &v)| (k, v))
    }

    /// `A = I - C`, so that the wavefunction exponent is `-½ xᵀ A x`.
    pub fn exponent_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::identity(self.modes, self.modes);
        for (&(i, j), &c) in &self.couplings {
            a[(i - 1, j - 1)] = -c;
            a[(j - 1, i - 1)] = -c;
        }
        a
    }

    /// Accepts iff every `|c_ij| < 1` and the exponent matrix is positive
    /// definite.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> std::result::Result<(), AdmissibilityError> {
        for (&(i, j), &value) in &self.couplings {
            if !(value.abs() < 1.0) {
                return Err(AdmissibilityError::CouplingOutOfRange { i, j, value });
            }
        }
        let min_eigenvalue = self
            .exponent_matrix()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !(min_eigenvalue > POSITIVE_DEFINITE_TOL) {
            return Err(AdmissibilityError::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(())
    }

    /// Covariance `½·diag(A⁻¹, A)`; the wavefunction is real, so there are
    /// no position-momentum correlations.
    pub fn covariance(&self) -> Result<CovarianceMatrix> {
        self.validate()?;
        let n = self.modes;
        let a = self.exponent_matrix();
        let a_inv = a
            .clone()
            .cholesky()
            .ok_or(AdmissibilityError::NotPositiveDefinite {
                min_eigenvalue: 0.0,
            })?
            .inverse();
        let mut entries = DMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                entries[(r, c)] = 0.5 * a_inv[(r, c)];
                entries[(n + r, n + c)] = 0.5 * a[(r, c)];
            }
        }
        // Cholesky inverse can differ from its transpose in the last bit.
        for r in 0..n {
            for c in (r + 1)..n {
                let v = entries[(r, c)];
                entries[(c, r)] = v;
            }
        }
        CovarianceMatrix::new(n, entries)
    }

    /// Wavefunction normalization `(det A)^{1/4} · π^{-n/4}`.
    pub fn normalization_constant(&self) -> Result<f64> {
        self.validate()?;
        let det = self.exponent_matrix().determinant();
        Ok(det.powf(0.25) * PI.powf(-(self.modes as f64) / 4.0))
    }

    /// Relabels modes so that new mode `k` is old mode `perm[k]` (0-based).
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.modes)?;
        let mut inverse = vec![0; self.modes];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut out = Self::new(self.modes)?;
        for (&(i, j), &c) in &self.couplings {
            out.set_coupling(inverse[i - 1] + 1, inverse[j - 1] + 1, c)?;
        }
        Ok(out)
    }
}

fn check_permutation(perm: &[usize], modes: usize) -> Result<()> {
    if perm.len() != modes {
        return Err(Error::Dimension {
            expected: modes,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; modes];
    for &p in perm {
        if p >= modes || seen[p] {
            return Err(Error::Options(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// The antisymmetric shift `[[0, -Λ], [Λ, 0]]` with `Λ = diag(λ)`.
///
/// With `Λ = I` this is the symplectic form Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticShift {
    lambdas: Vec<f64>,
}

impl SymplecticShift {
    pub fn standard(modes: usize) -> Self {
        Self {
            lambdas: vec![1.0; modes],
        }
    }

    pub fn scaled(lambdas: &[f64]) -> Self {
        Self {
            lambdas: lambdas.to_vec(),
        }
    }

    pub fn modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.lambdas.len();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for (k, &l) in self.lambdas.iter().enumerate() {
            m[(k, n + k)] = -l;
            m[(n + k, k)] = l;
        }
        m
    }
}

/// Outcome of the uncertainty-relation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub min_eigenvalue: f64,
    pub tol: f64,
}

impl Physicality {
    pub fn passed(&self) -> bool {
        self.min_eigenvalue >= -self.tol
    }
}

/// Real symmetric `2n × 2n` covariance matrix in `(q…, p…)` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    modes: usize,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Checks shape, finiteness and exact symmetry. Physicality is not
    /// assumed; see [`CovarianceMatrix::check_physicality`].
    pub fn new(modes: usize, entries: DMatrix<f64>) -> Result<Self> {
        check_modes(modes)?;
        let dim = 2 * modes;
        if entries.nrows() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: entries.nrows(),
            });
        }
        if entries.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: entries.ncols(),
            });
        }
        for r in 0..dim {
            for c in 0..dim {
                if !entries[(r, c)].is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        for r in 0..dim {
            for c in (r + 1)..dim {
                if entries[(r, c)] != entries[(c, r)] {
                    return Err(Error::Asymmetric { row: r, col: c });
                }
            }
        }
        Ok(Self { modes, entries })
    }

    pub fn from_row_slice(modes: usize, values: &[f64]) -> Result<Self> {
        let dim = 2 * modes;
        if values.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                found: values.len(),
            });
        }
        Self::new(modes, DMatrix::from_row_slice(dim, dim, values))
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::new(modes, DMatrix::identity(2 * modes, 2 * modes) * 0.5)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn qq_block(&self) -> DMatrix<f64> {
        self.entries
            .view((0, 0), (self.modes, self.modes))
            .into_owned()
    }

    pub fn pp_block(&self) -> DMatrix<f64> {
        let n = self.modes;
        self.entries.view((n, n), (n, n)).into_owned()
    }

    pub fn qp_block(&self) -> DMatrix<f64> {
        let n = self.modes;
        self.entries.view((0, n), (n, n)).into_owned()
    }

    /// `σ + (i/2)·shift` as a Hermitian complex matrix.
    pub fn shifted(&self, shift: &SymplecticShift) -> DMatrix<Complex64> {
        assert_eq!(shift.modes(), self.modes, "shift mode count mismatch");
        let omega = shift.matrix();
        DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            Complex64::new(self.entries[(r, c)], 0.5 * omega[(r, c)])
        })
    }

    /// Robertson–Schrödinger check: smallest eigenvalue of `σ + (i/2)Ω`
    /// must be at least `-tol`.
    pub fn check_physicality(&self, tol: f64) -> Physicality {
        let m = self.shifted(&SymplecticShift::standard(self.modes));
        Physicality {
            min_eigenvalue: linalg::hermitian_min_eigenvalue(m),
            tol,
        }
    }

    /// Like [`check_physicality`](Self::check_physicality) but turns a
    /// failure into [`Error::Unphysical`].
    pub fn require_physical(&self, tol: f64) -> Result<()> {
        let p = self.check_physicality(tol);
        if p.passed() {
            Ok(())
        } else {
            Err(Error::Unphysical {
                min_eigenvalue: p.min_eigenvalue,
            })
        }
    }

    /// Block-diagonal covariance of independent subsystems. Modes of the
    /// first block come first.
    pub fn direct_sum(blocks: &[CovarianceMatrix]) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.modes).sum();
        check_modes(n)?;
        let mut entries = DMatrix::zeros(2 * n, 2 * n);
        let mut offset = 0;
        for b in blocks {
            let m = b.modes;
            for r in 0..2 * m {
                for c in 0..2 * m {
                    let gr = if r < m {
                        offset + r
                    } else {
                        n + offset + r - m
                    };
                    let gc = if c < m {
                        offset + c
                    } else {
                        n + offset + c - m
                    };
                    entries[(gr, gc)] = b.entries[(r, c)];
                }
            }
            offset += m;
        }
        Self::new(n, entries)
    }

    /// Relabels modes so that new mode `k` is old mode `perm[k]` (0-based).
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.modes)?;
        let n = self.modes;
        let index = |k: usize| if k < n { perm[k] } else { n + perm[k - n] };
        let entries = DMatrix::from_fn(2 * n, 2 * n, |r, c| self.entries[(index(r), index(c))]);
        Self::new(n, entries)
    }
}
