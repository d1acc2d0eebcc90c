#pragma once

#include "mgc/laplacian.hpp"
#include "mgc/measure.hpp"

#include <map>
#include <mutex>

namespace mgc {

/// Heat semigroup P_t of the Kirchhoff Laplacian via spectral synthesis,
/// the heat kernel p_t(x,y) = sum_k e^{-lambda_k t} phi_k(x) phi_k(y), and
/// the dual semigroup H_t on measures. Off-node kernel values use
/// piecewise-linear interpolation of the eigenvectors.
///
/// All evaluations are const and safe to run concurrently; the per-t weight
/// cache is guarded by a mutex.
class HeatSemigroup {
public:
    explicit HeatSemigroup(const SpectralDecomposition& spec) : spec_(&spec) {}

    const Grid& grid() const { return *spec_->grid; }
    const SpectralDecomposition& spectrum() const { return *spec_; }

    /// P_t f. P_0 is the exact identity.
    GridFunction apply(const GridFunction& f, double t) const;

    /// p_t(x, y); throws NonpositiveTime for t <= 0.
    double kernel(double t, const GraphPoint& x, const GraphPoint& y) const;

    /// Nodal values of p_t(x, .).
    GridFunction kernel_column(double t, const GraphPoint& x) const;

    /// H_t mu: density parts evolve by P_t, atoms by their kernel columns.
    /// For t > 0 the result is absolutely continuous.
    DiscreteMeasure apply_measure(const DiscreteMeasure& mu, double t) const;

private:
    Eigen::VectorXd decay_weights(double t) const;

    const SpectralDecomposition* spec_;
    mutable std::map<double, Eigen::VectorXd> cache_;
    mutable std::mutex cache_mutex_;
};

} // namespace mgc
