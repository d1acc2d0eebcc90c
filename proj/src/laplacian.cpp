#include "mgc/laplacian.hpp"

#include "mgc/errors.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mgc {

Eigen::VectorXd KirchhoffLaplacian::apply(const Eigen::VectorXd& f) const {
    return (stiffness * f).cwiseQuotient(mass);
}

KirchhoffLaplacian assemble_laplacian(const Grid& grid) {
    KirchhoffLaplacian lap;
    lap.grid = &grid;
    lap.mass = grid.lumped();
    std::vector<Eigen::Triplet<double>> trip;
    const MetricGraph& g = grid.graph();
    for (int e = 0; e < g.edge_count(); ++e) {
        double w = 1.0 / grid.spacing(e);
        int n = grid.nodes_on_edge(e);
        for (int i = 0; i + 1 < n; ++i) {
            int a = grid.edge_node(e, i);
            int b = grid.edge_node(e, i + 1);
            trip.emplace_back(a, a, w);
            trip.emplace_back(b, b, w);
            trip.emplace_back(a, b, -w);
            trip.emplace_back(b, a, -w);
        }
    }
    lap.stiffness.resize(grid.node_count(), grid.node_count());
    lap.stiffness.setFromTriplets(trip.begin(), trip.end());
    return lap;
}

double SpectralDecomposition::lambda1() const {
    for (int k = 0; k < count(); ++k)
        if (eigenvalues[k] > 1e-9 * std::max(1.0, eigenvalues[count() - 1]))
            return eigenvalues[k];
    throw SolverFailure("no nonzero eigenvalue found");
}

SpectralDecomposition eigendecompose(const KirchhoffLaplacian& lap, int m, double eig_tol) {
    const int n = static_cast<int>(lap.mass.size());
    if (m < 0 || m > n)
        m = n;
    // Similarity transform B = M^{-1/2} A M^{-1/2} keeps the problem symmetric.
    Eigen::VectorXd sqrt_m = lap.mass.cwiseSqrt();
    Eigen::VectorXd inv_sqrt_m = sqrt_m.cwiseInverse();
    Eigen::MatrixXd b = Eigen::MatrixXd(lap.stiffness);
    b = inv_sqrt_m.asDiagonal() * b * inv_sqrt_m.asDiagonal();
    b = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success)
        throw SolverFailure("dense symmetric eigensolver failed");

    SpectralDecomposition spec;
    spec.grid = lap.grid;
    spec.mass = lap.mass;
    spec.eigenvalues = solver.eigenvalues().head(m).cwiseMax(0.0);
    spec.eigenvectors = inv_sqrt_m.asDiagonal() * solver.eigenvectors().leftCols(m);

    // Pin the kernel mode to the exact constant and project it out of the
    // higher modes; heat evolution then conserves mass to rounding instead of
    // drifting with the eigensolver's orthogonality residual.
    spec.eigenvalues[0] = 0.0;
    Eigen::VectorXd ground =
        Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(lap.mass.sum()));
    spec.eigenvectors.col(0) = ground;
    Eigen::VectorXd mg = lap.mass.cwiseProduct(ground);
    for (int k = 1; k < m; ++k) {
        double proj = mg.dot(spec.eigenvectors.col(k));
        spec.eigenvectors.col(k) -= proj * ground;
        double norm = std::sqrt(spec.eigenvectors.col(k).dot(
            lap.mass.cwiseProduct(spec.eigenvectors.col(k))));
        if (norm > 0.0)
            spec.eigenvectors.col(k) /= norm;
    }

    double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
    for (int k = 0; k < m; ++k) {
        Eigen::VectorXd u = spec.eigenvectors.col(k);
        double res = (lap.stiffness * u - spec.eigenvalues[k] * lap.mass.cwiseProduct(u))
                         .norm();
        if (res > eig_tol * scale * std::sqrt(static_cast<double>(n)))
            throw SolverFailure("eigenpair residual above tolerance");
    }
    return spec;
}

} // namespace mgc
