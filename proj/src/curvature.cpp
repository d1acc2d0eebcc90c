#include "mgc/curvature.hpp"

#include "mgc/errors.hpp"
#include "mgc/rng.hpp"

#include <algorithm>
#include <cmath>

namespace mgc {

double curvature_R(const CurvatureFunction& c, double t0, double t1) {
    double delta = t1 - t0;
    double x = 2.0 * c.K * delta;
    if (std::abs(x) < 1e-12)
        return std::exp(2.0 * c.K * t0) * (1.0 + 0.5 * x) / (c.C * c.C);
    return std::exp(2.0 * c.K * t0) * std::expm1(x) / (c.C * c.C * x);
}

double lambda1(const MetricGraph& g, double target_h) {
    auto lam = [&](double h) {
        Grid grid(g, h);
        return eigendecompose(assemble_laplacian(grid)).lambda1();
    };
    double coarse = lam(target_h);
    double fine = lam(target_h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

void VerificationReport::absorb(const VerificationReport& other) {
    if (other.worst_residual > worst_residual) {
        worst_residual = other.worst_residual;
        witness = other.witness;
        tolerance = other.tolerance;
    }
    pass = pass && other.pass;
}

std::vector<TestFunction> test_basis(const HeatSemigroup& heat, int eigenfunctions,
                                     int random_combos, std::uint64_t seed) {
    const Grid& grid = heat.grid();
    const SpectralDecomposition& spec = heat.spectrum();
    std::vector<TestFunction> basis;
    int avail = std::min(eigenfunctions, spec.count() - 1);
    for (int k = 1; k <= avail; ++k)
        basis.push_back({"eig" + std::to_string(k),
                         GridFunction(grid, spec.eigenvectors.col(k))});
    for (int v = 0; v < grid.graph().vertex_count(); ++v) {
        GridFunction d(grid);
        GraphPoint vp = grid.graph().vertex_point(v);
        for (int i = 0; i < grid.node_count(); ++i)
            d.values[i] = grid.graph().distance(grid.node_point(i), vp);
        basis.push_back({"dist_v" + std::to_string(v), std::move(d)});
    }
    Rng rng(seed);
    int low = std::min(8, spec.count() - 1);
    for (int r = 0; r < random_combos; ++r) {
        GridFunction f(grid);
        for (int k = 1; k <= low; ++k)
            f.values += rng.uniform(-1.0, 1.0) * spec.eigenvectors.col(k);
        basis.push_back({"rand" + std::to_string(r), std::move(f)});
    }
    return basis;
}

double estimate_C(const HeatSemigroup& heat, double K,
                  const std::vector<TestFunction>& basis,
                  const std::vector<double>& t_grid, double guard) {
    double best = 1.0;
    bool any = false;
    for (const TestFunction& tf : basis) {
        EdgeFunction sqrt_gamma = sqrt(gamma(tf.f));
        double scale = sqrt_gamma.max_abs();
        if (scale <= 0.0)
            continue;
        GridFunction collapsed = to_grid_function(sqrt_gamma);
        for (double t : t_grid) {
            if (t <= 0.0)
                continue;
            EdgeFunction num = sqrt(gamma(heat.apply(tf.f, t)));
            GridFunction den = heat.apply(collapsed, t);
            const Grid& g = heat.grid();
            for (int e = 0; e < g.graph().edge_count(); ++e)
                for (int i = 0; i < g.nodes_on_edge(e); ++i) {
                    double d = den.values[g.edge_node(e, i)];
                    if (d < guard * scale)
                        continue;
                    any = true;
                    double ratio = num.per_edge[e][i] / d * std::exp(K * t);
                    best = std::max(best, ratio);
                }
        }
    }
    if (!any)
        throw DegenerateDenominator("all denominators below the guard threshold");
    return best;
}

VerificationReport check_BEw(const HeatSemigroup& heat, const CurvatureFunction& c,
                             const GridFunction& f, double t, double tol) {
    VerificationReport rep;
    rep.condition = "BE_w";
    rep.tolerance = tol;
    const Grid& g = heat.grid();
    EdgeFunction lhs = gamma(heat.apply(f, t));
    double c2 = c(t) * c(t);
    EdgeFunction rhs_edge(g);
    if (t == 0.0) {
        rhs_edge = gamma(f);
    } else {
        GridFunction evolved = heat.apply(to_grid_function(gamma(f)), t);
        for (int e = 0; e < g.graph().edge_count(); ++e)
            for (int i = 0; i < g.nodes_on_edge(e); ++i)
                rhs_edge.per_edge[e][i] = evolved.values[g.edge_node(e, i)];
    }
    for (int e = 0; e < g.graph().edge_count(); ++e)
        for (int i = 0; i < g.nodes_on_edge(e); ++i) {
            double res = lhs.per_edge[e][i] - c2 * rhs_edge.per_edge[e][i];
            if (res > rep.worst_residual) {
                rep.worst_residual = res;
                rep.witness = "edge " + std::to_string(e) + " node " + std::to_string(i) +
                              " t=" + std::to_string(t);
            }
        }
    rep.pass = rep.worst_residual <= tol;
    return rep;
}

VerificationReport check_Kw(const HeatSemigroup& heat, const CurvatureFunction& c,
                            const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double t, double tol, double w_before) {
    VerificationReport rep;
    rep.condition = "K_w";
    rep.tolerance = tol;
    double before = w_before >= 0.0 ? w_before : w2_distance(mu, nu, W2Method::Auto);
    double after = w2_distance(heat.apply_measure(mu, t), heat.apply_measure(nu, t),
                               W2Method::Auto);
    rep.worst_residual = after - c(t) * before;
    rep.witness = "t=" + std::to_string(t);
    rep.pass = rep.worst_residual <= tol;
    return rep;
}

namespace {

double entropy_after_flow(const HeatSemigroup& heat, const DiscreteMeasure& mu, double t,
                          const char* what) {
    double e = entropy(t > 0.0 ? heat.apply_measure(mu, t) : mu);
    if (!std::isfinite(e))
        throw EntropyInfinite(std::string(what) + " has infinite entropy");
    return e;
}

} // namespace

VerificationReport check_EVIw(const HeatSemigroup& heat, const CurvatureFunction& c,
                              const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                              double t0, double t1, double tol) {
    if (t0 > t1)
        throw std::invalid_argument("check_EVIw needs t0 <= t1");
    VerificationReport rep;
    rep.condition = "EVI_w";
    rep.tolerance = tol;
    double w_before = w2_distance(mu1, mu0, W2Method::Auto);
    double w_after = w2_distance(heat.apply_measure(mu1, t1),
                                 heat.apply_measure(mu0, t0), W2Method::Auto);
    double ent0 = entropy_after_flow(heat, mu0, t0, "H_{t0} mu0");
    double ent1 = entropy_after_flow(heat, mu1, t1, "H_{t1} mu1");
    double r = curvature_R(c, t0, t1);
    double lhs = 0.5 * w_after * w_after - 0.5 / r * w_before * w_before;
    double rhs = (t1 - t0) * (ent0 - ent1);
    rep.worst_residual = lhs - rhs;
    rep.witness = "t0=" + std::to_string(t0) + " t1=" + std::to_string(t1);
    rep.pass = rep.worst_residual <= tol;
    return rep;
}

VerificationReport check_RCDw(const HeatSemigroup& heat, const CurvatureFunction& c,
                              const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                              double s, double t, double h, double tol) {
    if (!(h > 0.0) || s < 0.0 || s > 1.0)
        throw std::invalid_argument("check_RCDw needs h > 0 and s in [0,1]");
    VerificationReport rep;
    rep.condition = "RCD_w";
    rep.tolerance = tol;
    DiscreteMeasure mus = wasserstein_geodesic(mu0, mu1, s);
    double lhs = entropy(heat.apply_measure(mus, t + h));
    double ent0 = entropy_after_flow(heat, mu0, t, "H_t mu0");
    double ent1 = entropy_after_flow(heat, mu1, t, "H_t mu1");
    double w_before = w2_distance(mu0, mu1, W2Method::Auto);
    double w_after = w2_distance(heat.apply_measure(mu0, t),
                                 heat.apply_measure(mu1, t), W2Method::Auto);
    double r = curvature_R(c, t, t + h);
    double rhs = (1.0 - s) * ent0 + s * ent1 +
                 s * (1.0 - s) / (2.0 * h) *
                     (w_before * w_before / r - w_after * w_after);
    rep.worst_residual = lhs - rhs;
    rep.witness = "s=" + std::to_string(s) + " t=" + std::to_string(t) +
                  " h=" + std::to_string(h);
    rep.pass = rep.worst_residual <= tol;
    return rep;
}

OmegaResult omega(const HeatSemigroup& heat, const CurvatureFunction& c,
                  const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double s,
                  double h, int quad_points, double tol) {
    OmegaResult out;
    DiscreteMeasure mus = wasserstein_geodesic(mu0, mu1, s);
    double w = w2_distance(mu0, mu1, W2Method::Auto);
    double r = curvature_R(c, 0.0, h);
    double fisher_term = 0.0;
    for (int q = 0; q < quad_points; ++q) {
        double tau = h * (q + 0.5) / quad_points; // midpoint rule keeps tau > 0
        double fi = fisher_information(heat.apply_measure(mus, tau));
        if (!std::isfinite(fi)) {
            fisher_term = std::numeric_limits<double>::infinity();
            break;
        }
        fisher_term += fi * h / quad_points;
    }
    out.omega = s * (1.0 - s) / (2.0 * h) * (1.0 / r - 1.0) * w * w + fisher_term;
    out.entropy_mid = entropy(mus);
    double e0 = entropy(mu0), e1 = entropy(mu1);
    out.convex_combination = (1.0 - s) * e0 + s * e1;
    out.vacuous = !std::isfinite(out.entropy_mid) || !std::isfinite(out.omega) ||
                  !std::isfinite(out.convex_combination);
    out.corollary_holds =
        out.vacuous || out.entropy_mid <= out.convex_combination + out.omega + tol;
    return out;
}

GradientFlowResult check_gradient_flow(const HeatSemigroup& heat, const GridFunction& f0,
                                       double T, int nt, W2Method method) {
    if (nt < 1 || !(T > 0.0))
        throw std::invalid_argument("check_gradient_flow needs T > 0 and nt >= 1");
    MeasureCurve curve;
    DiscreteMeasure mu0 = measure_from_density(f0);
    double fisher_sum = 0.0;
    for (int i = 0; i <= nt; ++i) {
        double t = T * i / nt;
        curve.times.push_back(t);
        curve.measures.push_back(heat.apply_measure(mu0, t));
        double fi = fisher_information(curve.measures.back());
        fisher_sum += (i == 0 || i == nt) ? 0.5 * fi : fi;
    }
    GradientFlowResult out;
    out.entropy_initial = entropy(curve.measures.front());
    out.entropy_final = entropy(curve.measures.back());
    out.action = action(curve, method);
    out.fisher_integral = fisher_sum * (T / nt);
    out.defect = out.entropy_final - out.entropy_initial +
                 0.5 * (out.action + out.fisher_integral);
    return out;
}

} // namespace mgc
