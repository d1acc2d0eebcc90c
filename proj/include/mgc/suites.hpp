#pragma once

#include "mgc/curvature.hpp"
#include "mgc/regularization.hpp"
#include "mgc/report.hpp"
#include "mgc/rng.hpp"

#include <limits>
#include <memory>

namespace mgc {

/// Configuration shared by the verification suites. With a fixed seed every
/// run produces byte-identical reports.
struct SuiteConfig {
    double h = 1.0 / 64.0;
    std::vector<double> t_grid = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
    std::vector<double> kw_t_grid = {0.01, 0.05, 0.1, 0.5, 1.0};
    std::vector<double> eps_sweep = {0.1, 0.05, 0.02, 0.01, 0.005};
    std::uint64_t seed = 1;
    double force_C = std::numeric_limits<double>::quiet_NaN();
    double force_K = std::numeric_limits<double>::quiet_NaN();
    int kw_pairs = 100;
    double eig_tol = 1e-10;
};

/// Heavy per-graph state shared by the suites: grid, spectrum, heat
/// semigroup, the fitted curvature function and the test basis. Address
/// stable; create via the factory.
struct GraphContext {
    Grid grid;
    KirchhoffLaplacian laplacian;
    SpectralDecomposition spectrum;
    std::unique_ptr<HeatSemigroup> heat;
    double lam1 = 0.0; // Richardson-extrapolated
    CurvatureFunction fitted;
    std::vector<TestFunction> basis;
    SuiteConfig cfg;

    GraphContext() = default;
    GraphContext(const GraphContext&) = delete;
    GraphContext& operator=(const GraphContext&) = delete;

    const MetricGraph& graph() const { return grid.graph(); }
};

std::unique_ptr<GraphContext> make_context(const MetricGraph& g, const SuiteConfig& cfg);

SuiteOutcome run_be_suite(const GraphContext& ctx);
SuiteOutcome run_kw_suite(const GraphContext& ctx);
SuiteOutcome run_evi_suite(const GraphContext& ctx);
SuiteOutcome run_rcd_suite(const GraphContext& ctx);
SuiteOutcome run_gf_suite(const GraphContext& ctx);
SuiteOutcome run_reg_suite(const GraphContext& ctx);

/// Seeded probability measures used by the transport-based suites: Dirac
/// pairs, smooth positive densities and small atom clouds, cycled in a fixed
/// order.
DiscreteMeasure random_measure(const GraphContext& ctx, Rng& rng, int kind);
DiscreteMeasure smooth_random_density(const GraphContext& ctx, Rng& rng);

} // namespace mgc
