//! Dense complex linear algebra on `2^N`-dimensional TLS registers.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance on Hermiticity and on negative eigenvalues of density matrices.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros in entropy sums.
pub const EIGEN_CLIP: f64 = 1e-12;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

pub fn c64(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Dimension `2^n` of an `n`-TLS register.
pub fn register_dim(n: usize) -> usize {
    1usize << n
}

/// Whether TLS `tls` (1-based, TLS 1 is the most significant bit) is excited
/// in basis state `index` of an `n`-TLS register.
#[inline]
pub fn tls_is_excited(index: usize, tls: usize, n: usize) -> bool {
    (index >> (n - tls)) & 1 == 1
}

/// Number of excited TLS in a basis state.
#[inline]
pub fn excitation_count(index: usize) -> u32 {
    index.count_ones()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c64(v)),
    ))
}

pub fn outer(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn log2_dim(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

/// Reduced density matrix on the TLS listed in `keep` (1-based, any order;
/// the output keeps them in ascending order).
pub fn partial_trace(rho: &CMatrix, keep: &[usize], n: usize) -> Result<CMatrix> {
    if !rho.is_square() || rho.nrows() != register_dim(n) {
        return Err(Error::InvalidArgument(format!(
            "matrix of shape {:?} is not a {}-TLS operator",
            rho.shape(),
            n
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::InvalidArgument("keep set is empty".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::InvalidArgument(format!(
            "TLS index {bad} outside 1..={n}"
        )));
    }
    let traced: Vec<usize> = (1..=n).filter(|k| !kept.contains(k)).collect();

    // Scatter the bits of a sub-register index onto the listed TLS positions.
    let scatter = |sub: usize, positions: &[usize]| -> usize {
        let m = positions.len();
        positions
            .iter()
            .enumerate()
            .filter(|(q, _)| (sub >> (m - 1 - q)) & 1 == 1)
            .fold(0usize, |acc, (_, &tls)| acc | 1 << (n - tls))
    };

    let kd = register_dim(kept.len());
    let kept_idx: Vec<usize> = (0..kd).map(|a| scatter(a, &kept)).collect();
    let mut out = CMatrix::zeros(kd, kd);
    for r in 0..register_dim(traced.len()) {
        let base = scatter(r, &traced);
        for a in 0..kd {
            let row = base | kept_idx[a];
            for b in 0..kd {
                out[(a, b)] += rho[(row, base | kept_idx[b])];
            }
        }
    }
    Ok(out)
}

/// Hermitian eigen-decomposition. Fails with `InvalidState` if `m` is not
/// Hermitian within [`PSD_TOL`].
pub fn spectrum(m: &CMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "spectrum of non-square {:?} matrix",
            m.shape()
        )));
    }
    let residual = hermiticity_residual(m);
    if residual > PSD_TOL {
        return Err(Error::InvalidState(format!(
            "matrix is not Hermitian (residual {residual:e})"
        )));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// `-Σ x ln x` over a probability vector, with `0 ln 0 = 0`.
pub fn shannon_entropy<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    probs
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.ln())
        .sum()
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    let spec = spectrum(rho)?;
    Ok(shannon_entropy(
        spec.eigenvalues.into_iter().filter(|&l| l >= EIGEN_CLIP),
    ))
}

/// Keep the diagonal, zero everything else.
pub fn dephase_full(rho: &CMatrix) -> CMatrix {
    CMatrix::from_diagonal(&rho.diagonal())
}

/// Hermitian, PSD and unit-trace within [`PSD_TOL`].
pub fn check_density_matrix(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() || log2_dim(rho.nrows()).is_none() {
        return Err(Error::InvalidState(format!(
            "density matrix shape {:?} is not 2^N square",
            rho.shape()
        )));
    }
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > PSD_TOL || tr.im.abs() > PSD_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let spec = spectrum(rho)?;
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// Quantum relative entropy `S(ρ‖σ) = Tr ρ ln ρ − Tr ρ ln σ` in nats.
///
/// Only full-support `σ` is accepted; a singular `σ` gives `InvalidArgument`
/// rather than an infinite or convention-dependent value.
pub fn relative_entropy(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::InvalidArgument(format!(
            "shape mismatch {:?} vs {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    let neg_entropy = -von_neumann_entropy(rho)?;
    let sig = spectrum(sigma)?;
    let min = sig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < EIGEN_CLIP {
        return Err(Error::InvalidArgument(format!(
            "reference state is singular (min eigenvalue {min:e})"
        )));
    }
    let mut cross = 0.0;
    for (k, &mu) in sig.eigenvalues.iter().enumerate() {
        let v = sig.eigenvectors.column(k);
        let weight = (v.adjoint() * rho * v)[(0, 0)].re;
        cross += weight * mu.ln();
    }
    Ok(neg_entropy - cross)
}
