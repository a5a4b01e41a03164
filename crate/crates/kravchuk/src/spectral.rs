//! Shared spectral engine.
//!
//! The KT kernel, the Kravchuk function table, and the beam-splitter unitary
//! are all functions of one real symmetric tridiagonal generator
//!
//! ```text
//! X[l, l+1] = X[l+1, l] = sqrt((l+1)(S-l)) / 2,   l = 0..S-1
//! ```
//!
//! (the x-angular-momentum matrix of a spin S/2). Its spectrum is exactly
//! {-S/2, -S/2+1, ..., S/2} with unit gaps, so after one eigendecomposition
//! per size the eigenvalues are snapped to those exact half-integers and any
//! matrix exponential e^{i·theta·(X - shift·I)} follows by a pair of matrix
//! products at machine precision — no special-function cancellation anywhere.

use nalgebra::{Complex, DMatrix};

pub(crate) type C64 = Complex<f64>;

/// Eigendecomposition of the tridiagonal generator for one size.
pub(crate) struct JxEigen {
    s: usize,
    /// Column k is the eigenvector for eigenvalue k - S/2 (ascending).
    vectors: DMatrix<f64>,
}

/// The generator matrix itself (useful to tests and the XY-chain mapping).
pub(crate) fn jx_matrix(s: usize) -> DMatrix<f64> {
    let n = s + 1;
    let mut x = DMatrix::<f64>::zeros(n, n);
    for l in 0..s {
        let q = (((l + 1) * (s - l)) as f64).sqrt() / 2.0;
        x[(l, l + 1)] = q;
        x[(l + 1, l)] = q;
    }
    x
}

pub(crate) fn jx_eigen(s: usize) -> JxEigen {
    let n = s + 1;
    let eig = jx_matrix(s).symmetric_eigen();
    // sort eigenpairs ascending, then snap eigenvalues to the exact spectrum
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (k, &src) in idx.iter().enumerate() {
        let exact = k as f64 - s as f64 / 2.0;
        let got = eig.eigenvalues[src];
        assert!(
            (got - exact).abs() < 1e-6 * (s as f64 + 1.0),
            "eigenvalue {got} of the size-{s} generator strayed from exact {exact}"
        );
        vectors.set_column(k, &eig.eigenvectors.column(src));
    }
    JxEigen { s, vectors }
}

impl JxEigen {
    /// e^{i·theta·(X - shift·I)} as a dense complex matrix.
    ///
    /// Computed as V · diag(e^{i·theta·(lambda_k - shift)}) · V^T with the
    /// exact eigenvalues lambda_k = k - S/2; the eigenvector sign ambiguity
    /// cancels in the V·D·V^T sandwich.
    pub(crate) fn evolve(&self, theta: f64, shift: f64) -> DMatrix<C64> {
        let n = self.s + 1;
        let v = self.vectors.map(|x| C64::new(x, 0.0));
        // B = V * diag(phase)
        let mut b = v.clone();
        for k in 0..n {
            let lambda = k as f64 - self.s as f64 / 2.0;
            let phase = C64::new(0.0, theta * (lambda - shift)).exp();
            for r in 0..n {
                b[(r, k)] *= phase;
            }
        }
        // plain transpose, not adjoint: V is real
        b * v.transpose()
    }
}
