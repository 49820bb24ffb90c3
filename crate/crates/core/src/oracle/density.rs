use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::info::Bits;

/// Eigenvalues below this contribute nothing to an entropy.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Density matrix over an ordered set of qubits; row/column bit `i` is
/// `qubits[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub qubits: Vec<usize>,
    pub matrix: Mat<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (m[(i, j)] - m[(j, i)].conj()).norm()))
            .fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Bits {
        Bits::new(entropy_of_spectrum(&self.eigenvalues()))
    }
}

/// Ascending eigenvalues of a Hermitian matrix, read from its lower half.
fn hermitian_eigenvalues(m: &Mat<Complex64>) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    let eigenvalues = m
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigensolver failed to converge");
    assert!(eigenvalues.iter().all(|l| l.is_finite()), "non-finite eigenvalue");
    eigenvalues
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_FLOOR)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Checks that `subset` names distinct qubits below `n_qubits`.
pub(crate) fn check_subset(subset: &[usize], n_qubits: usize) -> Result<()> {
    let mut seen = 0u64;
    for &q in subset {
        if q >= n_qubits {
            return Err(Error::InvalidSubset(format!("qubit {q} does not exist ({n_qubits} qubits)")));
        }
        if seen & (1 << q) != 0 {
            return Err(Error::InvalidSubset(format!("qubit {q} listed twice")));
        }
        seen |= 1 << q;
    }
    Ok(())
}

/// Reshapes a pure state into the matrix `M[a, b]` whose rows index the
/// qubits of `subset` (in the given order) and whose columns index the rest.
fn bipartition(psi: &[Complex64], n_qubits: usize, subset: &[usize]) -> Mat<Complex64> {
    let mut in_subset = vec![false; n_qubits];
    for &q in subset {
        in_subset[q] = true;
    }
    let rest: Vec<usize> = (0..n_qubits).filter(|&q| !in_subset[q]).collect();
    let gather = |idx: usize, qubits: &[usize]| {
        qubits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &q)| acc | (((idx >> q) & 1) << i))
    };
    let mut m = Mat::zeros(1 << subset.len(), 1 << rest.len());
    for (idx, &amp) in psi.iter().enumerate() {
        m[(gather(idx, subset), gather(idx, &rest))] = amp;
    }
    m
}

/// `Tr_rest |ψ⟩⟨ψ|` over the qubits of `subset`.
pub(crate) fn reduce(psi: &[Complex64], n_qubits: usize, subset: &[usize]) -> DensityMatrix {
    let m = bipartition(psi, n_qubits, subset);
    DensityMatrix {
        qubits: subset.to_vec(),
        matrix: &m * m.adjoint(),
    }
}

/// Entropy of the reduction of a pure state to `subset`, in bits.
///
/// `M M†` and `M† M` share their nonzero spectrum, so the eigenproblem is
/// solved on whichever side of the cut is smaller.
pub(crate) fn subset_entropy(psi: &[Complex64], n_qubits: usize, subset: &[usize]) -> f64 {
    let m = bipartition(psi, n_qubits, subset);
    let gram = if m.nrows() <= m.ncols() {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    entropy_of_spectrum(&hermitian_eigenvalues(&gram))
}
