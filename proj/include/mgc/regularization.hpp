#pragma once

#include "mgc/measure.hpp"
#include "mgc/transport.hpp"

#include <functional>

namespace mgc {

/// Averaging window between a graph G and its extension G^{2eps}. Every
/// original edge e carries the scaling alpha_e = (l_e + 2 eps) / l_e and a
/// chart [-l_e/2 - 2 eps, l_e/2 + 2 eps] covering the pendant at the tail,
/// the edge itself, and the pendant at the head.
///
/// Functions on the extended graph are pulled back by the windowed average
///   phi^eps(x) = 1/(2 eps) * integral over (alpha x - eps, alpha x + eps),
/// measures are pushed forward by duality; the push-forward of a probability
/// measure has an explicit density bounded by 1/(2 eps).
class RegularizationMap {
public:
    RegularizationMap(const MetricGraph& base, double eps, double target_h);

    const MetricGraph& base() const { return base_; }
    const GraphExtension& extension() const { return ext_; }
    const Grid& base_grid() const { return base_grid_; }
    const Grid& extended_grid() const { return ext_grid_; }
    double eps() const { return eps_; }
    double alpha(int edge) const { return alpha_[edge]; }

    /// Point of the extended graph at chart coordinate xi of original edge e.
    GraphPoint chart_point(int e, double xi) const;

    /// phi^eps sampled at the base grid nodes (the window integral of the
    /// piecewise-linear interpolant is evaluated exactly).
    GridFunction regularize_function(const GridFunction& phi_ext) const;

    /// Pointwise value of phi^eps at chart coordinate x of edge e.
    double regularized_value(const GridFunction& phi_ext, int e, double x) const;

    /// Derivative of phi^eps: alpha/(2 eps) (phi(alpha x + eps) - phi(alpha x - eps)).
    double regularized_derivative(const GridFunction& phi_ext, int e, double x) const;

    /// mu^eps on the extended grid. Nodal densities are exact dual-cell
    /// averages, so total mass is preserved exactly and the density cap
    /// 1/(2 eps) holds nodewise.
    DiscreteMeasure regularize_measure(const DiscreteMeasure& mu) const;

private:
    double window_mass(const DiscreteMeasure& mu, int e, double c0, double c1) const;

    MetricGraph base_;
    GraphExtension ext_;
    double eps_;
    Grid base_grid_;
    Grid ext_grid_;
    std::vector<double> alpha_;
};

struct ActionTransferReport {
    double eps = 0.0;
    double bound = 0.0;      // 1 + 2 eps / l_min
    double max_ratio = 0.0;  // worst |mu^eps'| / |mu'| over the samples
    double worst_excess = 0.0; // max_ratio - bound
    bool pass = false;
};

/// Checks |(mu^eps)'(s_i)| <= (1 + 2 eps / l_min) |mu'(s_i)| + tol at every
/// sample of an AC^2 curve.
ActionTransferReport action_transfer_check(const MeasureCurve& curve,
                                           const RegularizationMap& map,
                                           double tol,
                                           W2Method method = W2Method::Auto);

/// Convolution in time against the bump mollifier zeta_k(t) = k zeta(k t),
/// with the curve extended constantly outside its time interval. The curve
/// must be uniformly sampled with spacing dividing 1/k, so the convolution is
/// an exact finite mixture of samples.
MeasureCurve mollify_in_time(const MeasureCurve& curve, double k);

/// Normalized mollifier weights at sample offsets.
std::vector<double> mollifier_weights(double k, double dt);

struct StronglyRegularCurve {
    int n = 0;
    std::shared_ptr<RegularizationMap> map;
    MeasureCurve curve; // densities on the extended grid, C^1 in time
    std::vector<Eigen::VectorXd> time_derivative; // difference quotients
};

/// Extension in time, spatial regularization with eps = 1/n and time
/// mollification with k = n.
StronglyRegularCurve strongly_regular_approx(const MeasureCurve& curve, int n,
                                             double target_h);

} // namespace mgc
