#pragma once

#include "mgc/measure.hpp"

#include <vector>

namespace mgc {

/// Optimal coupling between two weighted point sets. Row sums of the sparse
/// coupling reproduce the source masses, column sums the target masses.
struct TransportPlan {
    std::vector<Atom> source;
    std::vector<Atom> target;
    struct Entry {
        int i;
        int j;
        double mass;
    };
    std::vector<Entry> entries;
};

struct W2Result {
    double distance = 0.0;
    double cost = 0.0; // optimal value of the squared-cost problem
    TransportPlan plan;
    double duality_gap = 0.0;
};

/// Exact discrete optimal transport with cost d^2 over the union of the two
/// supports (network/transportation simplex). Throws MassMismatch when the
/// total masses differ by more than 1e-12.
W2Result w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Exact optimal transport between explicit weighted point sets.
W2Result w2_points(const MetricGraph& g, const std::vector<Atom>& a,
                   const std::vector<Atom>& b);

/// True when the graph is a chain (two degree-one endpoints, no branching),
/// so measures admit a global arclength coordinate.
bool is_path_graph(const MetricGraph& g);

/// True when the graph is a single cycle (every vertex of degree two).
bool is_cycle_graph(const MetricGraph& g);

/// W2 between absolutely continuous measures on a path graph via the quantile
/// representation of the piecewise-linear densities. Much finer resolution
/// than the node-lumped LP for nearby measures.
double w2_quantile_path(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// W2 on a cycle graph: quantile cost minimized over the rotation offset
/// (the cost is convex in the offset).
double w2_quantile_cycle(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// True when w2_distance(.., Auto) takes an exact quantile route for these
/// measures rather than the node-lumped LP.
bool has_exact_w2_route(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

enum class W2Method { Auto, LP, Quantile };

/// Distance-only evaluation with route selection. Auto prefers the quantile
/// route when it applies and falls back to the LP.
double w2_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   W2Method method = W2Method::LP);

/// Displacement interpolation: push-forward of the optimal plan under
/// constant-speed graph geodesics. s = 0 or 1 returns the input measure.
DiscreteMeasure wasserstein_geodesic(const DiscreteMeasure& mu0,
                                     const DiscreteMeasure& mu1, double s);

/// Sampled curve of probability measures.
struct MeasureCurve {
    std::vector<double> times;
    std::vector<DiscreteMeasure> measures;

    int count() const { return static_cast<int>(times.size()); }
};

/// |mu'|(s_i) by forward difference quotients (backward at the last sample).
double metric_derivative(const MeasureCurve& curve, int i,
                         W2Method method = W2Method::Auto);

/// Riemann-sum action integral of squared forward-difference speeds.
double action(const MeasureCurve& curve, W2Method method = W2Method::Auto);

struct HopfLaxOptions {
    bool quadratic_cost = true; // d^2/(2s); the linear d/(2s) variant is kept
                                // behind this flag
};

/// Hopf-Lax semigroup: exact discrete infimum over grid nodes of
/// phi(y) + d(x,y)^2 / (2s).
GridFunction hopf_lax(const GridFunction& phi, double s, const HopfLaxOptions& opt = {});

/// Dense node-to-node distance matrix of a grid.
Eigen::MatrixXd node_distance_matrix(const Grid& grid);

} // namespace mgc
