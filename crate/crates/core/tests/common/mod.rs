//! Random state generators and closed-form references shared by the
//! integration tests.
#![allow(dead_code)]

use gsep::{CovarianceMatrix, PureStateSpec};
use nalgebra::DMatrix;
use rand::Rng;

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn random_symmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    symmetrize(DMatrix::from_fn(n, n, |_, _| rng.gen_range(-scale..scale)))
}

/// Random symplectic matrix in `(q…, p…)` ordering, built from shears
/// `[[I,0],[B,I]]`, `[[I,B],[0,I]]` (B symmetric) and `diag(M, M⁻ᵀ)`.
pub fn random_symplectic<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut lower = DMatrix::identity(2 * n, 2 * n);
    let mut upper = DMatrix::identity(2 * n, 2 * n);
    let b1 = random_symmetric(rng, n, 0.6);
    let b2 = random_symmetric(rng, n, 0.6);
    for r in 0..n {
        for c in 0..n {
            lower[(n + r, c)] = b1[(r, c)];
            upper[(r, n + c)] = b2[(r, c)];
        }
    }
    let m = DMatrix::identity(n, n) + DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3));
    let m_inv_t = m
        .clone()
        .try_inverse()
        .expect("near-identity matrix")
        .transpose();
    let mut local = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            local[(r, c)] = m[(r, c)];
            local[(n + r, n + c)] = m_inv_t[(r, c)];
        }
    }
    lower * local * upper
}

/// `S·T·Sᵀ` for a thermal `T = ½ diag(ν, ν)` and random symplectic `S`,
/// plus optional classical noise. Always satisfies the uncertainty relation.
pub fn random_physical<R: Rng>(rng: &mut R, n: usize) -> CovarianceMatrix {
    let s = random_symplectic(rng, n);
    let mut thermal = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let nu = 1.0 + rng.gen_range(0.0..1.5);
        thermal[(k, k)] = 0.5 * nu;
        thermal[(n + k, n + k)] = 0.5 * nu;
    }
    let g = DMatrix::from_fn(2 * n, 2 * n, |_, _| rng.gen_range(-0.2..0.2));
    let noise = &g * g.transpose() * rng.gen_range(0.0..1.0);
    CovarianceMatrix::new(n, symmetrize(&s * thermal * s.transpose() + noise)).unwrap()
}

/// One random single-mode state: thermal noise, squeezing and rotation.
pub fn random_single_mode<R: Rng>(rng: &mut R) -> CovarianceMatrix {
    let nu = 1.0 + rng.gen_range(0.0..1.0);
    let r: f64 = rng.gen_range(-0.8..0.8);
    let (theta, phi): (f64, f64) = (rng.gen_range(0.0..3.2), rng.gen_range(0.0..3.2));
    let rot = |a: f64| DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()]);
    let sq = DMatrix::from_row_slice(2, 2, &[r.exp(), 0.0, 0.0, (-r).exp()]);
    let s = rot(theta) * sq * rot(phi);
    CovarianceMatrix::new(1, symmetrize(&s * s.transpose() * (0.5 * nu))).unwrap()
}

/// Separable block: product of single-mode states plus classical noise.
pub fn random_separable_block<R: Rng>(rng: &mut R, n: usize) -> CovarianceMatrix {
    let singles: Vec<_> = (0..n).map(|_| random_single_mode(rng)).collect();
    let base = CovarianceMatrix::direct_sum(&singles).unwrap();
    let g = DMatrix::from_fn(2 * n, 2 * n, |_, _| rng.gen_range(-0.3..0.3));
    let noise = &g * g.transpose() * rng.gen_range(0.0..1.0);
    CovarianceMatrix::new(n, symmetrize(base.entries() + noise)).unwrap()
}

/// Direct sum of separable blocks over a random partition of `n` modes.
pub fn random_direct_sum<R: Rng>(rng: &mut R, n: usize) -> CovarianceMatrix {
    let mut blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        let size = rng.gen_range(1..=left.min(n - 1).max(1));
        blocks.push(random_separable_block(rng, size));
        left -= size;
    }
    CovarianceMatrix::direct_sum(&blocks).unwrap()
}

/// Random admissible pure spec with every coupling in `(-bound, bound)` and
/// smallest exponent eigenvalue above `margin`.
pub fn random_admissible<R: Rng>(rng: &mut R, n: usize, bound: f64, margin: f64) -> PureStateSpec {
    loop {
        let mut spec = PureStateSpec::new(n).unwrap();
        for i in 1..=n {
            for j in (i + 1)..=n {
                spec.set_coupling(i, j, rng.gen_range(-bound..bound))
                    .unwrap();
            }
        }
        let min = spec
            .exponent_matrix()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min > margin {
            return spec;
        }
    }
}

pub fn three_mode(c12: f64, c13: f64, c23: f64) -> PureStateSpec {
    PureStateSpec::new(3)
        .unwrap()
        .with_coupling(1, 2, c12)
        .unwrap()
        .with_coupling(1, 3, c13)
        .unwrap()
        .with_coupling(2, 3, c23)
        .unwrap()
}

pub fn four_mode(couplings: &[(usize, usize, f64)]) -> PureStateSpec {
    let mut spec = PureStateSpec::new(4).unwrap();
    for &(i, j, c) in couplings {
        spec.set_coupling(i, j, c).unwrap();
    }
    spec
}

/// All couplings 1/4 except `c34`.
pub fn four_mode_full(c34: f64) -> PureStateSpec {
    four_mode(&[
        (1, 2, 0.25),
        (1, 3, 0.25),
        (1, 4, 0.25),
        (2, 3, 0.25),
        (2, 4, 0.25),
        (3, 4, c34),
    ])
}

fn pattern_matrix(n: usize, qq: (f64, f64), qp: f64, pp: (f64, f64)) -> CovarianceMatrix {
    let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, true) => {
            if r == c {
                qq.0
            } else {
                qq.1
            }
        }
        (false, false) => {
            if r == c {
                pp.0
            } else {
                pp.1
            }
        }
        _ => qp,
    });
    CovarianceMatrix::new(n, m).unwrap()
}

pub fn mixed_three_mode() -> CovarianceMatrix {
    pattern_matrix(3, (6.0 / 5.0, 1.0 / 5.0), 1.0 / 10.0, (0.5, -1.0 / 8.0))
}

pub fn mixed_four_mode() -> CovarianceMatrix {
    pattern_matrix(4, (8.0 / 5.0, 2.0 / 5.0), 1.0 / 10.0, (0.5, -1.0 / 8.0))
}

/// Reference closed form for the single-coupling three-mode state:
/// `-(c²(1-λ₁λ₂)² - (1-λ₁²)(1-λ₂²)) / (64 λ₁²λ₂²λ₃² (1-c²))`.
pub fn reference_single_coupling(c: f64, l: [f64; 3]) -> f64 {
    let bracket = c * c * (1.0 - l[0] * l[1]).powi(2) - (1.0 - l[0] * l[0]) * (1.0 - l[1] * l[1]);
    -bracket / (64.0 * (l[0] * l[1] * l[2]).powi(2) * (1.0 - c * c))
}

/// Direct evaluation for the single-coupling state as a product of the
/// two-mode block on modes 1, 2 and the vacuum on mode 3:
/// `Σ = Σ₁₂(λ₁, λ₂) · (1/λ₃² − 1)/4` with
/// `Σ₁₂ = −(c²(1−λ₁λ₂)² − (1−λ₁²)(1−λ₂²)) / (16 λ₁²λ₂² (1−c²))`.
pub fn product_single_coupling(c: f64, l: [f64; 3]) -> f64 {
    let bracket = c * c * (1.0 - l[0] * l[1]).powi(2) - (1.0 - l[0] * l[0]) * (1.0 - l[1] * l[1]);
    let pair = -bracket / (16.0 * (l[0] * l[1]).powi(2) * (1.0 - c * c));
    let vacuum = 0.25 * (1.0 / (l[2] * l[2]) - 1.0);
    pair * vacuum
}

pub fn rel_close(a: f64, b: f64, rel: f64, abs_floor: f64) -> bool {
    (a - b).abs() <= (rel * a.abs().max(b.abs())).max(abs_floor)
}
