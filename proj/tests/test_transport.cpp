#include "mgc/transport.hpp"

#include "mgc/errors.hpp"
#include "mgc/functionals.hpp"
#include "mgc/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace mgc;

namespace {

MetricGraph interval() { return MetricGraph::build(2, {{0, 1, 1.0}}); }
MetricGraph star3() {
    return MetricGraph::build(4, {{1, 0, 1.0}, {2, 0, 1.0}, {3, 0, 1.0}});
}
MetricGraph circle() { return MetricGraph::build(1, {{0, 0, 1.0}}); }

DiscreteMeasure bump(const Grid& g, double center, double width) {
    GridFunction f = sample(g, [&](int, double x) {
        double z = (x - center) / width;
        return std::exp(-z * z);
    });
    DiscreteMeasure mu = measure_from_density(f);
    mu.normalize();
    return mu;
}

} // namespace

TEST_CASE("w2 basics") {
    Grid g(interval(), 1.0 / 50);

    DiscreteMeasure mu = bump(g, -0.2, 0.1);
    W2Result self = w2(mu, mu);
    CHECK(self.distance == doctest::Approx(0.0).epsilon(1e-10));
    for (const auto& entry : self.plan.entries)
        CHECK(entry.i == entry.j); // diagonal plan

    DiscreteMeasure dx = dirac(g, {0, -0.3});
    DiscreteMeasure dy = dirac(g, {0, 0.2});
    W2Result two = w2(dx, dy);
    CHECK(two.distance == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(two.plan.entries.size() == 1);
    CHECK(two.plan.entries[0].mass == doctest::Approx(1.0));

    // masses (1/2, 1/2) at {0,1} vs {1/4, 3/4}: cost 1/16, W2 = 1/4
    DiscreteMeasure a(g), b(g);
    a.atoms = {{{0, -0.5}, 0.5}, {{0, 0.5}, 0.5}};
    b.atoms = {{{0, -0.25}, 0.5}, {{0, 0.25}, 0.5}};
    W2Result r = w2(a, b);
    CHECK(r.cost == doctest::Approx(1.0 / 16).epsilon(1e-12));
    CHECK(r.distance == doctest::Approx(0.25).epsilon(1e-12));

    DiscreteMeasure heavy = dirac(g, {0, 0.0}, 2.0);
    CHECK_THROWS_AS(w2(dx, heavy), MassMismatch);
}

TEST_CASE("marginals of the optimal plan") {
    Grid g(star3(), 1.0 / 16);
    Rng rng(3);
    DiscreteMeasure mu(g), nu(g);
    for (int a = 0; a < 4; ++a) {
        mu.atoms.push_back({{rng.uniform_int(3), rng.uniform(-0.5, 0.5)}, 0.2 + rng.uniform()});
        nu.atoms.push_back({{rng.uniform_int(3), rng.uniform(-0.5, 0.5)}, 0.2 + rng.uniform()});
    }
    mu.normalize();
    nu.normalize();
    W2Result r = w2(mu, nu);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(4), col = Eigen::VectorXd::Zero(4);
    for (const auto& e : r.plan.entries) {
        row[e.i] += e.mass;
        col[e.j] += e.mass;
        CHECK(e.mass >= 0.0);
    }
    for (int i = 0; i < 4; ++i) {
        CHECK(row[i] == doctest::Approx(r.plan.source[i].mass).epsilon(1e-12));
        CHECK(col[i] == doctest::Approx(r.plan.target[i].mass).epsilon(1e-12));
    }
    CHECK(r.duality_gap <= 1e-9);
}

TEST_CASE("solver matches the brute-force vertex enumeration") {
    for (const MetricGraph& g : {interval(), star3(), circle()}) {
        Grid grid(g, 0.2);
        Rng rng(11);
        for (int trial = 0; trial < 40; ++trial) {
            int n = 2 + rng.uniform_int(3), m = 2 + rng.uniform_int(3);
            std::vector<Atom> a, b;
            double ma = 0.0, mb = 0.0;
            for (int i = 0; i < n; ++i) {
                int e = rng.uniform_int(g.edge_count());
                a.push_back({{e, rng.uniform(-0.5, 0.5) * g.edge(e).length},
                             0.1 + rng.uniform()});
                ma += a.back().mass;
            }
            for (int j = 0; j < m; ++j) {
                int e = rng.uniform_int(g.edge_count());
                b.push_back({{e, rng.uniform(-0.5, 0.5) * g.edge(e).length},
                             0.1 + rng.uniform()});
                mb += b.back().mass;
            }
            for (auto& at : a)
                at.mass /= ma;
            for (auto& at : b)
                at.mass /= mb;

            W2Result res = w2_points(g, a, b);
            Eigen::MatrixXd cost(n, m);
            Eigen::VectorXd av(n), bv(m);
            for (int i = 0; i < n; ++i) {
                av[i] = a[i].mass;
                for (int j = 0; j < m; ++j) {
                    double d = g.distance(a[i].point, b[j].point);
                    cost(i, j) = d * d;
                }
            }
            for (int j = 0; j < m; ++j)
                bv[j] = b[j].mass;
            double brute = oracle::brute_force_transport(cost, av, bv);
            CHECK(res.cost == doctest::Approx(brute).epsilon(1e-11));
        }
    }
}

TEST_CASE("triangle inequality over random measure triples") {
    Grid g(star3(), 1.0 / 24);
    Rng rng(29);
    for (int trial = 0; trial < 15; ++trial) {
        DiscreteMeasure mu(g), nu(g), rho(g);
        for (DiscreteMeasure* m : {&mu, &nu, &rho}) {
            for (int a = 0; a < 3; ++a)
                m->atoms.push_back(
                    {{rng.uniform_int(3), rng.uniform(-0.5, 0.5)}, 0.1 + rng.uniform()});
            m->normalize();
        }
        double dxy = w2(mu, nu).distance;
        double dyz = w2(nu, rho).distance;
        double dxz = w2(mu, rho).distance;
        CHECK(dxz <= dxy + dyz + 1e-10);
    }
}

TEST_CASE("quantile route agrees with the LP for separated densities") {
    Grid g(interval(), 1.0 / 128);
    DiscreteMeasure a = bump(g, -0.25, 0.08);
    DiscreteMeasure b = bump(g, 0.3, 0.12);
    double lp = w2(a, b).distance;
    double qt = w2_quantile_path(a, b);
    CHECK(lp == doctest::Approx(qt).epsilon(2e-3));
    CHECK(w2_distance(a, b, W2Method::Auto) == qt);

    CHECK_THROWS_AS(w2_quantile_path(dirac(g, {0, 0.0}), a), AtomicMeasure);
}

TEST_CASE("cycle quantile route") {
    Grid g(circle(), 1.0 / 256);
    // rotationally shifted narrow bumps: with negligible overlap the optimal
    // transport is the rotation itself
    auto wrapped_bump = [&](double center) {
        GridFunction f = sample(g, [&](int, double x) {
            double d = std::min(std::abs(x - center), 1.0 - std::abs(x - center));
            return std::exp(-(d * d) / 0.002);
        });
        DiscreteMeasure mu = measure_from_density(f);
        mu.normalize();
        return mu;
    };
    DiscreteMeasure a = wrapped_bump(-0.2);
    DiscreteMeasure b = wrapped_bump(-0.05);
    double qt = w2_quantile_cycle(a, b);
    CHECK(qt == doctest::Approx(0.15).epsilon(2e-3));
    double lp = w2(a, b).distance;
    CHECK(lp == doctest::Approx(qt).epsilon(5e-3));

    // rotation beyond half the circumference wraps around the short way
    DiscreteMeasure c = wrapped_bump(0.45);
    CHECK(w2_quantile_cycle(a, c) == doctest::Approx(0.35).epsilon(2e-3));
}

TEST_CASE("displacement interpolation") {
    Grid g(interval(), 1.0 / 100);
    DiscreteMeasure a = dirac(g, {0, -0.5});
    DiscreteMeasure b = dirac(g, {0, 0.5});

    DiscreteMeasure start = wasserstein_geodesic(a, b, 0.0);
    CHECK(start.atoms.size() == 1);
    CHECK(start.atoms[0].point.s == doctest::Approx(-0.5));

    DiscreteMeasure mid = wasserstein_geodesic(a, b, 0.5);
    REQUIRE(mid.atoms.size() == 1);
    CHECK(mid.atoms[0].point.s == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("geodesics run at constant speed") {
    for (const MetricGraph& graph : {interval(), star3()}) {
        Grid g(graph, 1.0 / 24);
        Rng rng(37);
        for (int trial = 0; trial < 8; ++trial) {
            DiscreteMeasure mu(g), nu(g);
            for (DiscreteMeasure* m : {&mu, &nu}) {
                for (int a = 0; a < 3; ++a)
                    m->atoms.push_back({{rng.uniform_int(graph.edge_count()),
                                         rng.uniform(-0.5, 0.5)},
                                        0.1 + rng.uniform()});
                m->normalize();
            }
            double full = w2(mu, nu).distance;
            for (double s : {0.25, 0.5, 0.8}) {
                DiscreteMeasure mid = wasserstein_geodesic(mu, nu, s);
                CHECK(w2(mu, mid).distance == doctest::Approx(s * full).epsilon(1e-8));
                CHECK(w2(mid, nu).distance ==
                      doctest::Approx((1.0 - s) * full).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("curve action and metric derivative") {
    Grid g(interval(), 1.0 / 100);

    MeasureCurve constant;
    for (int i = 0; i <= 4; ++i) {
        constant.times.push_back(i / 4.0);
        constant.measures.push_back(bump(g, 0.0, 0.1));
    }
    CHECK(action(constant) == doctest::Approx(0.0).epsilon(1e-12));

    // geodesic between the endpoint Diracs: unit speed, action d^2 = 1
    MeasureCurve geo;
    const int steps = 8;
    for (int i = 0; i <= steps; ++i) {
        geo.times.push_back(static_cast<double>(i) / steps);
        geo.measures.push_back(dirac(g, {0, -0.5 + static_cast<double>(i) / steps}));
    }
    CHECK(action(geo) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(metric_derivative(geo, 3) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("heat-flow curves have finite action away from zero") {
    Grid g(star3(), 1.0 / 48);
    KirchhoffLaplacian lap = assemble_laplacian(g);
    SpectralDecomposition spec = eigendecompose(lap);
    HeatSemigroup heat(spec);
    DiscreteMeasure start = dirac_at_vertex(g, 1);
    MeasureCurve curve;
    const int steps = 10;
    for (int i = 0; i <= steps; ++i) {
        double t = 0.05 + 0.25 * i / steps;
        curve.times.push_back(t);
        curve.measures.push_back(heat.apply_measure(start, t));
    }
    double a = action(curve);
    CHECK(std::isfinite(a));
    CHECK(a > 0.0);
}

TEST_CASE("hopf-lax semigroup") {
    Grid g(interval(), 1.0 / 100);

    GridFunction c(g, Eigen::VectorXd::Constant(g.node_count(), 2.5));
    for (double s : {0.1, 1.0})
        CHECK((hopf_lax(c, s).values.array() - 2.5).abs().maxCoeff() <= 1e-13);

    // phi(y) = d(y, x0)^2 / 2 has the Moreau envelope d^2 / (2 (1+s))
    GraphPoint x0{0, -0.5};
    GridFunction phi(g);
    for (int i = 0; i < g.node_count(); ++i) {
        double d = g.graph().distance(g.node_point(i), x0);
        phi.values[i] = 0.5 * d * d;
    }
    for (double s : {0.05, 0.2}) {
        GridFunction q = hopf_lax(phi, s);
        for (int i = 0; i < g.node_count(); i += 7) {
            double d = g.graph().distance(g.node_point(i), x0);
            double expected = d * d / (2.0 * (1.0 + s));
            CHECK(q.values[i] == doctest::Approx(expected).epsilon(5e-4));
            CHECK(q.values[i] <= phi.values[i] + 1e-13); // Q_s phi <= phi
        }
    }

    // monotone in s
    GridFunction q1 = hopf_lax(phi, 0.1), q2 = hopf_lax(phi, 0.3);
    CHECK((q2.values - q1.values).maxCoeff() <= 1e-13);

    // two-step composition dominates the direct semigroup step exactly in the
    // discrete infimum, and matches it up to O(h)
    GridFunction direct = hopf_lax(phi, 0.3);
    GridFunction composed = hopf_lax(hopf_lax(phi, 0.2), 0.1);
    CHECK((composed.values - direct.values).minCoeff() >= -1e-12);
    CHECK((composed.values - direct.values).cwiseAbs().maxCoeff() <= 0.05);

    // linear-cost variant stays behind its flag
    HopfLaxOptions lin;
    lin.quadratic_cost = false;
    GridFunction ql = hopf_lax(phi, 0.5, lin);
    CHECK(ql.values.minCoeff() >= -1e-13);
}

TEST_CASE("hamilton-jacobi residual at interior nodes") {
    Grid g(interval(), 1.0 / 200);
    GraphPoint x0{0, -0.5};
    GridFunction phi(g);
    for (int i = 0; i < g.node_count(); ++i)
        phi.values[i] = g.graph().distance(g.node_point(i), x0);
    double s = 0.2, ds = 1e-3;
    GridFunction qs = hopf_lax(phi, s);
    GridFunction qs2 = hopf_lax(phi, s + ds);
    LipschitzConstants lip = lipschitz_constants(qs);
    for (int i = 5; i < g.node_count() - 5; i += 11) {
        double dq = (qs2.values[i] - qs.values[i]) / ds;
        double residual = dq + 0.5 * lip.local[i] * lip.local[i];
        CHECK(residual <= 0.05);
    }
}
