#include "mgc/functionals.hpp"
#include "mgc/heat_semigroup.hpp"
#include "mgc/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace mgc;

namespace {

MetricGraph interval() { return MetricGraph::build(2, {{0, 1, 1.0}}); }
MetricGraph star3() {
    return MetricGraph::build(4, {{1, 0, 1.0}, {2, 0, 1.0}, {3, 0, 1.0}});
}

GridFunction random_function(const Grid& g, Rng& rng) {
    GridFunction f(g);
    for (int i = 0; i < g.node_count(); ++i)
        f.values[i] = rng.uniform(-1.0, 1.0);
    return f;
}

} // namespace

TEST_CASE("gradients of simple functions") {
    Grid g(interval(), 1.0 / 200);
    GridFunction c(g, Eigen::VectorXd::Constant(g.node_count(), 2.0));
    CHECK(gradient(c).max_abs() == doctest::Approx(0.0));

    GridFunction lin = sample(g, [](int, double x) { return x; });
    EdgeFunction dlin = gradient(lin);
    for (int i = 0; i < g.nodes_on_edge(0); ++i)
        CHECK(dlin.per_edge[0][i] == doctest::Approx(1.0).epsilon(1e-13));

    GridFunction cosf = sample(g, [](int, double x) { return std::cos(M_PI * (x + 0.5)); });
    CHECK(gradient(cosf).max_abs() == doctest::Approx(M_PI).epsilon(0.02));
}

TEST_CASE("dirichlet and cheeger energies") {
    Grid g(interval(), 1.0 / 200);
    GridFunction c(g, Eigen::VectorXd::Constant(g.node_count(), 5.0));
    CHECK(dirichlet_energy(c) == doctest::Approx(0.0));

    GridFunction lin = sample(g, [](int, double x) { return x; });
    CHECK(dirichlet_energy(lin) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(cheeger_energy(lin) == doctest::Approx(0.5).epsilon(1e-13));

    GridFunction cosf = sample(g, [](int, double x) { return std::cos(M_PI * (x + 0.5)); });
    CHECK(dirichlet_energy(cosf) == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-3));
}

TEST_CASE("parallelogram identity holds to rounding") {
    Grid g(star3(), 1.0 / 64);
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        GridFunction f = random_function(g, rng);
        GridFunction gfun = random_function(g, rng);
        GridFunction sum(g, f.values + gfun.values);
        GridFunction diff(g, f.values - gfun.values);
        double lhs = cheeger_energy(sum) + cheeger_energy(diff);
        double rhs = 2.0 * cheeger_energy(f) + 2.0 * cheeger_energy(gfun);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("gamma operator") {
    Grid g(star3(), 1.0 / 32);
    Rng rng(17);
    GridFunction f = random_function(g, rng);
    GridFunction c(g, Eigen::VectorXd::Constant(g.node_count(), 3.0));

    EdgeFunction gc = gamma(f, c);
    CHECK(gc.max_abs() == doctest::Approx(0.0));

    EdgeFunction gf = gamma(f);
    for (const auto& edge_vals : gf.per_edge)
        CHECK(edge_vals.minCoeff() >= 0.0);

    // polarization: Gamma(f,g) = (Gamma(f+g) - Gamma(f-g)) / 4
    GridFunction h = random_function(g, rng);
    EdgeFunction direct = gamma(f, h);
    GridFunction sum(g, f.values + h.values), diff(g, f.values - h.values);
    EdgeFunction gsum = gamma(sum), gdiff = gamma(diff);
    for (std::size_t e = 0; e < direct.per_edge.size(); ++e) {
        Eigen::VectorXd polar = 0.25 * (gsum.per_edge[e] - gdiff.per_edge[e]);
        CHECK((polar - direct.per_edge[e]).cwiseAbs().maxCoeff() <= 1e-12);
    }

    Grid other(interval(), 0.25);
    GridFunction wrong(other);
    CHECK_THROWS_AS(gamma(f, wrong), GridMismatch);
}

TEST_CASE("entropy values") {
    MetricGraph s = star3();
    Grid g(s, 1.0 / 64);

    DiscreteMeasure uni = uniform_measure(g);
    CHECK(entropy(uni) == doctest::Approx(std::log(1.0 / s.total_length())).epsilon(1e-12));

    DiscreteMeasure atom = dirac_at_vertex(g, 0);
    CHECK(entropy(atom) == std::numeric_limits<double>::infinity());

    // density 1 on a unit-length interval
    Grid gi(interval(), 1.0 / 64);
    DiscreteMeasure lebesgue(gi);
    lebesgue.density.setOnes();
    CHECK(entropy(lebesgue) == doctest::Approx(0.0));
}

TEST_CASE("regularized entropy") {
    Grid g(interval(), 1.0 / 128);
    GridFunction f = sample(g, [](int, double x) { return 1.0 + 0.5 * std::sin(3.0 * x); });
    DiscreteMeasure mu = measure_from_density(f);
    mu.normalize();

    double ent = entropy(mu);
    double prev = -std::numeric_limits<double>::infinity();
    for (double delta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        double ed = entropy_delta(mu, delta);
        CHECK(ed >= ent - 1e-13); // Ent_delta dominates Ent
        bool monotone = ed <= prev + 1e-13 ||
                        prev == -std::numeric_limits<double>::infinity();
        CHECK(monotone);
        // paper-style upper bound through the L2 norm of the density
        double l2 = g.lumped().dot(mu.density.cwiseProduct(mu.density));
        CHECK(ed <= l2 / delta + std::log(delta) + 1e-12);
        prev = ed;
    }
    CHECK(std::abs(entropy_delta(mu, 1e-6) - ent) <= 1e-3);

    // constant density c: Ent_delta = log(c + delta)
    DiscreteMeasure uni = uniform_measure(g);
    CHECK(entropy_delta(uni, 0.25) == doctest::Approx(std::log(1.0 + 0.25)).epsilon(1e-12));

    CHECK_THROWS_AS(entropy_delta(dirac_at_vertex(g, 0), 0.1), AtomicMeasure);
}

TEST_CASE("fisher information") {
    Grid g(interval(), 1.0 / 400);

    DiscreteMeasure uni = uniform_measure(g);
    CHECK(fisher_information(uni) == doctest::Approx(0.0));

    // f(x) = x + 1/2 on [0,1]: I = log 3
    GridFunction f = sample(g, [](int, double x) { return x + 1.0; });
    DiscreteMeasure mu = measure_from_density(f);
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fisher_information(mu) == doctest::Approx(std::log(3.0)).epsilon(1e-4));

    // cross-check through the independent route I = 4 E(sqrt f); the
    // identity pins the integrand normalization of the chain rule
    GridFunction sqrtf(g, f.values.cwiseSqrt());
    double via_energy = 4.0 * dirichlet_energy(sqrtf);
    CHECK(std::abs(fisher_information(mu) - via_energy) <= 0.5 / 400.0);

    // zero density under a nonzero gradient flags +infinity
    GridFunction spike(g);
    spike.values[g.node_count() / 2] = 1.0;
    DiscreteMeasure bad = measure_from_density(spike);
    CHECK(fisher_information(bad) == std::numeric_limits<double>::infinity());
}

TEST_CASE("fisher vanishes only for constants") {
    Grid g(star3(), 1.0 / 32);
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        GridFunction f(g);
        for (int i = 0; i < g.node_count(); ++i)
            f.values[i] = 1.0 + 0.3 * rng.uniform();
        DiscreteMeasure mu = measure_from_density(f);
        double fi = fisher_information(mu);
        CHECK(fi >= 0.0);
        double spread = f.values.maxCoeff() - f.values.minCoeff();
        if (spread > 1e-3)
            CHECK(fi > 0.0);
    }
    CHECK(fisher_information(uniform_measure(g)) == doctest::Approx(0.0));
}

TEST_CASE("lipschitz constants") {
    MetricGraph s = star3();
    Grid g(s, 1.0 / 64);

    GridFunction c(g, Eigen::VectorXd::Constant(g.node_count(), 4.0));
    LipschitzConstants lc = lipschitz_constants(c);
    CHECK(lc.global == doctest::Approx(0.0));
    CHECK(lc.local.maxCoeff() == doctest::Approx(0.0));

    // distance to a leaf tip is 1-Lipschitz with unit slope everywhere
    GraphPoint tip = s.vertex_point(1);
    GridFunction d(g);
    for (int i = 0; i < g.node_count(); ++i)
        d.values[i] = s.distance(g.node_point(i), tip);
    LipschitzConstants ld = lipschitz_constants(d);
    CHECK(ld.global == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ld.local.maxCoeff() == doctest::Approx(1.0).epsilon(1e-9));
    // geodesic-space identity: global Lip equals the sup of local lip
    CHECK(ld.global == doctest::Approx(ld.local.maxCoeff()).epsilon(1e-9));

    // global Lip matches the max gradient for smooth functions up to O(h)
    Grid gi(interval(), 1.0 / 128);
    GridFunction smooth = sample(gi, [](int, double x) { return std::sin(2.0 * x); });
    LipschitzConstants ls = lipschitz_constants(smooth);
    CHECK(ls.global == doctest::Approx(2.0).epsilon(2.0 / 128));
}

TEST_CASE("entropy dissipation along the heat flow") {
    Grid g(interval(), 1.0 / 128);
    KirchhoffLaplacian lap = assemble_laplacian(g);
    SpectralDecomposition spec = eigendecompose(lap);
    HeatSemigroup heat(spec);

    GridFunction f0 = sample(g, [](int, double x) { return 1.0 + 0.5 * std::cos(M_PI * (x + 0.5)); });
    DiscreteMeasure mu = measure_from_density(f0);
    mu.normalize();

    double t0 = 0.02, t1 = 0.06;
    double drop = entropy(heat.apply_measure(mu, t1)) - entropy(heat.apply_measure(mu, t0));
    // Simpson quadrature of the Fisher information over [t0, t1]
    double mid = fisher_information(heat.apply_measure(mu, 0.5 * (t0 + t1)));
    double left = fisher_information(heat.apply_measure(mu, t0));
    double right = fisher_information(heat.apply_measure(mu, t1));
    double integral = (t1 - t0) / 6.0 * (left + 4.0 * mid + right);
    CHECK(drop == doctest::Approx(-integral).epsilon(1e-3));
}

TEST_CASE("lip of the evolved function matches its gradient at interior nodes") {
    Grid g(star3(), 1.0 / 64);
    KirchhoffLaplacian lap = assemble_laplacian(g);
    SpectralDecomposition spec = eigendecompose(lap);
    HeatSemigroup heat(spec);
    Rng rng(71);
    GridFunction f = random_function(g, rng);
    GridFunction pf = heat.apply(f, 0.05);
    LipschitzConstants lc = lipschitz_constants(pf);
    EdgeFunction grad = gradient(pf);
    for (int e = 0; e < 3; ++e)
        for (int i = 2; i + 2 < g.nodes_on_edge(e); ++i) {
            double lip_node = lc.local[g.edge_node(e, i)];
            double grad_node = std::abs(grad.per_edge[e][i]);
            CHECK(lip_node == doctest::Approx(grad_node).epsilon(0.1));
        }
}

TEST_CASE("functionals record") {
    Grid g(interval(), 1.0 / 64);
    DiscreteMeasure uni = uniform_measure(g);
    Functionals rec = evaluate_functionals(uni);
    CHECK(rec.dirichlet == doctest::Approx(0.0));
    CHECK(rec.fisher == doctest::Approx(0.0));
    CHECK(rec.entropy == doctest::Approx(0.0).epsilon(1e-12));
}
