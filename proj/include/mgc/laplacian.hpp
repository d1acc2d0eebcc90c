#pragma once

#include "mgc/grid.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace mgc {

/// Discrete Laplacian with standard (Kirchhoff) vertex coupling. The
/// stiffness matrix is the per-edge second-difference form: interior rows are
/// the usual three-point stencil, vertex rows sum the one-sided outward
/// differences of all incident edges, which is the discrete form of
///   sum_{e in E(v)} d/dx f^e(v) * n^e(v) = 0.
/// Row sums vanish, so constants are in the kernel, and the operator
/// M^{-1} A is symmetric w.r.t. the lumped-mass inner product.
struct KirchhoffLaplacian {
    const Grid* grid = nullptr;
    Eigen::SparseMatrix<double> stiffness; // A, positive semidefinite
    Eigen::VectorXd mass;                  // lumped mass diagonal M

    /// Applies the (nonnegative) operator M^{-1} A.
    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
};

KirchhoffLaplacian assemble_laplacian(const Grid& grid);

/// Generalized eigenpairs A u = lambda M u with eigenvectors orthonormal in
/// the M inner product. Eigenvalues ascend; lambda_0 = 0 with constant
/// eigenvector on connected graphs.
struct SpectralDecomposition {
    const Grid* grid = nullptr;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors; // columns, M-orthonormal
    Eigen::VectorXd mass;

    int count() const { return static_cast<int>(eigenvalues.size()); }
    double lambda1() const;
};

/// m smallest eigenpairs (m < 0: all). Throws SolverFailure when the residual
/// ||A u - lambda M u|| exceeds eig_tol relative to the spectral scale.
SpectralDecomposition eigendecompose(const KirchhoffLaplacian& lap, int m = -1,
                                     double eig_tol = 1e-10);

} // namespace mgc
