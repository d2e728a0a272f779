//! Truncated Fock-basis representation of Gaussian states and a dense
//! Uhlmann-fidelity evaluator.
//!
//! This is a verification path that shares nothing with
//! [`gaussian_fidelity`](crate::gaussian::gaussian_fidelity) beyond the
//! covariance matrix itself: matrix elements come from the multidimensional
//! Hermite recursion of the state's Husimi covariance and the fidelity from
//! eigendecompositions of the resulting density matrices.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::gaussian::GaussianState;

pub type Complex64 = Complex<f64>;

pub const DEFAULT_CUTOFF: usize = 30;
/// Largest probability mass a truncated state may lose.
pub const TRACE_DEFICIT_THRESHOLD: f64 = 1e-10;

const CHOP_TOL: f64 = 1e-14;
const CLIP_TOL: f64 = 1e-6;
const MAX_ENTRIES: usize = 1 << 26;

/// Fidelity computed in a truncated Fock basis, together with the largest
/// trace deficit of the two truncated states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockFidelity {
    pub value: f64,
    pub trace_deficit: f64,
}

/// Density matrix of a zero-mean Gaussian state on Fock levels `0..cutoff`
/// of every mode. Row/column index is `n_1 * cutoff^(k-1) + ... + n_k`.
pub fn fock_density_matrix(state: &GaussianState, cutoff: usize) -> Result<DMatrix<Complex64>> {
    if cutoff == 0 {
        return domain("cutoff must be positive");
    }
    if state.mean().iter().any(|m| *m != 0.0) {
        return domain("Fock construction is implemented for zero-mean states only");
    }
    let n = state.num_modes();
    let order = 2 * n;
    let total = cutoff
        .checked_pow(order as u32)
        .filter(|&t| t <= MAX_ENTRIES)
        .ok_or_else(|| Error::Domain(format!("cutoff {cutoff} too large for {n} modes")))?;

    let (a_mat, prefactor) = hermite_kernel(state)?;

    let mut g = vec![Complex64::new(0.0, 0.0); total];
    g[0] = Complex64::new(prefactor, 0.0);
    let strides: Vec<usize> = (0..order).map(|d| cutoff.pow((order - 1 - d) as u32)).collect();
    let mut digits = vec![0usize; order];
    for flat in 1..total {
        increment(&mut digits, cutoff);
        // Step down along the first non-zero index: G_{k} built from G_{k - e_i}.
        let i = digits.iter().position(|&d| d > 0).expect("flat > 0");
        let lowered = flat - strides[i];
        let k_i = (digits[i] - 1) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..order {
            let kj = if j == i { digits[j] - 1 } else { digits[j] };
            if kj == 0 || a_mat[(i, j)] == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc += a_mat[(i, j)] * (kj as f64).sqrt() * g[lowered - strides[j]];
        }
        g[flat] = acc / (k_i + 1.0).sqrt();
    }

    let dim = cutoff.pow(n as u32);
    Ok(DMatrix::from_row_slice(dim, dim, &g))
}

/// `A = X (I - Q⁻¹)*` and `1/√det Q` for the Husimi covariance `Q` of the
/// state in the `(a_1..a_n, a_1†..a_n†)` basis.
fn hermite_kernel(state: &GaussianState) -> Result<(DMatrix<Complex64>, f64)> {
    let n = state.num_modes();
    let dim = 2 * n;
    let cov = state.cov();
    // interleaved (x1,p1,x2,p2,..) -> (x1..xn, p1..pn)
    let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    let xxpp = DMatrix::from_fn(dim, dim, |r, c| Complex64::new(cov[(perm[r], perm[c])], 0.0));

    let half = Complex64::new(0.5, 0.0);
    let w = DMatrix::from_fn(dim, dim, |r, c| {
        let (rb, cb) = (r / n, c / n);
        if r % n != c % n {
            Complex64::new(0.0, 0.0)
        } else {
            match (rb, cb) {
                (_, 0) => half,
                (0, 1) => Complex64::new(0.0, 0.5),
                _ => Complex64::new(0.0, -0.5),
            }
        }
    });
    let sigma = &w * xxpp * w.adjoint();
    let q = sigma + DMatrix::<Complex64>::identity(dim, dim) * half;
    let det_q = q.determinant();
    if !(det_q.re > 0.0) || det_q.im.abs() > 1e-9 * det_q.re {
        return Err(Error::Numerical(format!("Husimi covariance has determinant {det_q}")));
    }
    let q_inv = q
        .try_inverse()
        .ok_or_else(|| Error::Numerical("Husimi covariance is singular".into()))?;
    let inner = (DMatrix::<Complex64>::identity(dim, dim) - q_inv).map(|z| z.conj());
    let mut a_mat = DMatrix::from_fn(dim, dim, |r, c| inner[((r + n) % dim, c)]);
    let scale = a_mat.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in a_mat.iter_mut() {
        if z.norm() <= CHOP_TOL * scale {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    Ok((a_mat, 1.0 / det_q.re.sqrt()))
}

fn increment(digits: &mut [usize], base: usize) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

/// Uhlmann fidelity of two Gaussian states evaluated in a truncated Fock
/// basis, with the default trace-deficit threshold.
pub fn fock_fidelity_oracle(a: &GaussianState, b: &GaussianState, cutoff: usize) -> Result<FockFidelity> {
    fock_fidelity_oracle_with_threshold(a, b, cutoff, TRACE_DEFICIT_THRESHOLD)
}

pub fn fock_fidelity_oracle_with_threshold(
    a: &GaussianState,
    b: &GaussianState,
    cutoff: usize,
    threshold: f64,
) -> Result<FockFidelity> {
    if a.num_modes() != b.num_modes() {
        return domain("fidelity needs equal mode counts");
    }
    let rho = fock_density_matrix(a, cutoff)?;
    let sigma = fock_density_matrix(b, cutoff)?;
    let deficit = trace_deficit(&rho).max(trace_deficit(&sigma));
    if deficit > threshold {
        return Err(Error::Precision { deficit, threshold });
    }
    Ok(FockFidelity {
        value: uhlmann_fidelity(&rho, &sigma)?,
        trace_deficit: deficit,
    })
}

pub fn trace_deficit(rho: &DMatrix<Complex64>) -> f64 {
    1.0 - rho.trace().re
}

/// `Tr √(√ρ σ √ρ)` for Hermitian positive semi-definite `ρ`, `σ`, taken as
/// the nuclear norm of `√ρ √σ`.
///
/// Works block by block over the connected components of the joint
/// sparsity pattern, which is exact whenever both matrices are block
/// diagonal on the same partition.
pub fn uhlmann_fidelity(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> Result<f64> {
    if rho.shape() != sigma.shape() || rho.nrows() != rho.ncols() {
        return domain("density matrices must be square and of equal size");
    }
    let mut total = 0.0;
    for block in joint_blocks(rho, sigma) {
        let product = herm_sqrt(&submatrix(rho, &block))? * herm_sqrt(&submatrix(sigma, &block))?;
        total += product.singular_values().sum();
    }
    if !total.is_finite() {
        return Err(Error::Numerical(format!("fidelity evaluated to {total}")));
    }
    Ok(total)
}

fn joint_blocks(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let dim = rho.nrows();
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let zero = Complex64::new(0.0, 0.0);
    for r in 0..dim {
        for c in (r + 1)..dim {
            if rho[(r, c)] != zero || sigma[(r, c)] != zero {
                let (pr, pc) = (find(&mut parent, r), find(&mut parent, c));
                if pr != pc {
                    parent[pr.max(pc)] = pr.min(pc);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; dim];
    for i in 0..dim {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

fn submatrix(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

fn herm_sqrt(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let eig = SymmetricEigen::new(m.clone());
    let mut roots = eig.eigenvalues.clone();
    for lambda in roots.iter_mut() {
        if *lambda < -CLIP_TOL {
            return Err(Error::Numerical(format!(
                "density matrix has eigenvalue {lambda}"
            )));
        }
        *lambda = lambda.max(0.0).sqrt();
    }
    let u = &eig.eigenvectors;
    let diag = DMatrix::from_diagonal(&roots.map(|x| Complex64::new(x, 0.0)));
    Ok(u * diag * u.adjoint())
}
