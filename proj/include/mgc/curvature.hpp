#pragma once

#include "mgc/functionals.hpp"
#include "mgc/heat_semigroup.hpp"
#include "mgc/transport.hpp"

#include <string>
#include <vector>

namespace mgc {

/// Curvature function c(t) = C e^{-Kt} with C >= 1.
struct CurvatureFunction {
    double C = 1.0;
    double K = 0.0;

    double operator()(double t) const { return C * std::exp(-K * t); }
};

/// R(t0, t1) = integral over s in [0,1] of c^{-2}((1-s) t0 + s t1), in
/// closed form: (e^{2K t1} - e^{2K t0}) / (2 C^2 K (t1 - t0)) away from the
/// diagonal and C^{-2} e^{2Kt} on it.
double curvature_R(const CurvatureFunction& c, double t0, double t1);

/// lambda_1 Richardson-extrapolated across grids with spacing h and h/2.
double lambda1(const MetricGraph& g, double target_h);

struct VerificationReport {
    std::string condition;
    std::string cases;
    double worst_residual = -std::numeric_limits<double>::infinity();
    double tolerance = 0.0;
    bool pass = true;
    std::string witness;

    void absorb(const VerificationReport& other);
};

/// Named test function on a grid.
struct TestFunction {
    std::string name;
    GridFunction f;
};

/// Basis used to fit and probe the gradient estimate: the first nontrivial
/// eigenfunctions, the distance functions to every vertex, and seeded random
/// low-pass eigenfunction combinations.
std::vector<TestFunction> test_basis(const HeatSemigroup& heat, int eigenfunctions = 10,
                                     int random_combos = 20, std::uint64_t seed = 1);

/// Largest observed sqrt-form ratio sup sqrt(Gamma(P_t f)) / (e^{-Kt} P_t
/// sqrt(Gamma(f))) over the family, the time grid and the grid points.
/// Denominators below guard * max sqrt(Gamma(f)) are excluded; throws
/// DegenerateDenominator when nothing remains.
double estimate_C(const HeatSemigroup& heat, double K,
                  const std::vector<TestFunction>& basis,
                  const std::vector<double>& t_grid, double guard = 1e-10);

/// Gamma(P_t f) <= c^2(t) P_t Gamma(f): worst signed residual over the grid.
VerificationReport check_BEw(const HeatSemigroup& heat, const CurvatureFunction& c,
                             const GridFunction& f, double t, double tol);

/// W2(H_t mu, H_t nu) <= c(t) W2(mu, nu). Distance evaluations take the exact
/// quantile route when one exists. A precomputed W2(mu, nu) may be passed to
/// avoid recomputation across a time grid.
VerificationReport check_Kw(const HeatSemigroup& heat, const CurvatureFunction& c,
                            const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double t, double tol, double w_before = -1.0);

/// Weak evolutionary variational inequality between times t0 <= t1.
VerificationReport check_EVIw(const HeatSemigroup& heat, const CurvatureFunction& c,
                              const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                              double t0, double t1, double tol);

/// Weak curvature-dimension condition along the displacement interpolation.
VerificationReport check_RCDw(const HeatSemigroup& heat, const CurvatureFunction& c,
                              const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                              double s, double t, double h, double tol);

struct OmegaResult {
    double omega = 0.0;
    double entropy_mid = 0.0;      // Ent(mu_s)
    double convex_combination = 0.0; // (1-s) Ent(mu0) + s Ent(mu1)
    bool vacuous = false;          // Ent(mu_s) or omega infinite
    bool corollary_holds = false;  // Ent(mu_s) <= combination + omega (+tol)
};

/// Distortion coefficient omega(s) at t = 0 and the distorted-convexity
/// corollary it controls.
OmegaResult omega(const HeatSemigroup& heat, const CurvatureFunction& c,
                  const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double s,
                  double h, int quad_points = 16, double tol = 0.0);

struct GradientFlowResult {
    double entropy_initial = 0.0;
    double entropy_final = 0.0;
    double action = 0.0;       // integral of |mu'|^2
    double fisher_integral = 0.0;
    double defect = 0.0;       // D = Ent_T - Ent_0 + (action + fisher)/2
};

/// Evaluates the gradient-flow functional D along t -> H_t(f0 Lebesgue) with
/// nt uniform time steps.
GradientFlowResult check_gradient_flow(const HeatSemigroup& heat, const GridFunction& f0,
                                       double T, int nt,
                                       W2Method method = W2Method::Auto);

} // namespace mgc
