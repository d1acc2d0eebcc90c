#include "mgc/functionals.hpp"

#include "mgc/errors.hpp"

#include <cmath>
#include <limits>

namespace mgc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double eta(double r) { return r > 0.0 ? r * std::log(r) : 0.0; }
} // namespace

double EdgeFunction::max_abs() const {
    double m = 0.0;
    for (const auto& v : per_edge)
        if (v.size() > 0)
            m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

EdgeFunction gradient(const GridFunction& f) {
    const Grid& g = *f.grid;
    EdgeFunction out(g);
    for (int e = 0; e < g.graph().edge_count(); ++e) {
        int n = g.nodes_on_edge(e);
        double h = g.spacing(e);
        auto val = [&](int i) { return f.values[g.edge_node(e, i)]; };
        Eigen::VectorXd& d = out.per_edge[e];
        d[0] = (val(1) - val(0)) / h;
        for (int i = 1; i + 1 < n; ++i)
            d[i] = (val(i + 1) - val(i - 1)) / (2.0 * h);
        d[n - 1] = (val(n - 1) - val(n - 2)) / h;
    }
    return out;
}

EdgeFunction gamma(const GridFunction& f, const GridFunction& g) {
    if (!f.grid->same_as(*g.grid))
        throw GridMismatch("gamma needs both functions on the same grid");
    return product(gradient(f), gradient(g));
}

EdgeFunction gamma(const GridFunction& f) { return gamma(f, f); }

EdgeFunction product(const EdgeFunction& a, const EdgeFunction& b) {
    EdgeFunction out(*a.grid);
    for (std::size_t e = 0; e < a.per_edge.size(); ++e)
        out.per_edge[e] = a.per_edge[e].cwiseProduct(b.per_edge[e]);
    return out;
}

EdgeFunction sqrt(const EdgeFunction& a) {
    EdgeFunction out(*a.grid);
    for (std::size_t e = 0; e < a.per_edge.size(); ++e)
        out.per_edge[e] = a.per_edge[e].cwiseMax(0.0).cwiseSqrt();
    return out;
}

GridFunction to_grid_function(const EdgeFunction& a) {
    const Grid& g = *a.grid;
    GridFunction out(g);
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(g.node_count());
    for (int e = 0; e < g.graph().edge_count(); ++e) {
        int n = g.nodes_on_edge(e);
        double h = g.spacing(e);
        for (int i = 0; i < n; ++i) {
            double w = (i == 0 || i == n - 1) ? h / 2.0 : h;
            out.values[g.edge_node(e, i)] += w * a.per_edge[e][i];
            weight[g.edge_node(e, i)] += w;
        }
    }
    out.values.array() /= weight.array();
    return out;
}

double integrate(const EdgeFunction& a) {
    const Grid& g = *a.grid;
    double total = 0.0;
    for (int e = 0; e < g.graph().edge_count(); ++e) {
        int n = g.nodes_on_edge(e);
        double h = g.spacing(e);
        double s = 0.5 * (a.per_edge[e][0] + a.per_edge[e][n - 1]);
        for (int i = 1; i + 1 < n; ++i)
            s += a.per_edge[e][i];
        total += h * s;
    }
    return total;
}

double dirichlet_energy(const GridFunction& f) {
    const Grid& g = *f.grid;
    double total = 0.0;
    for (int e = 0; e < g.graph().edge_count(); ++e) {
        int n = g.nodes_on_edge(e);
        double h = g.spacing(e);
        for (int i = 0; i + 1 < n; ++i) {
            double d = f.values[g.edge_node(e, i + 1)] - f.values[g.edge_node(e, i)];
            total += d * d / h;
        }
    }
    return total;
}

double cheeger_energy(const GridFunction& f) { return dirichlet_energy(f) / 2.0; }

double entropy(const DiscreteMeasure& mu) {
    if (mu.has_atoms())
        return kInf;
    const Grid& g = *mu.grid;
    double s = 0.0;
    for (int i = 0; i < g.node_count(); ++i)
        s += g.lumped()[i] * eta(mu.density[i]);
    return s;
}

double entropy_delta(const DiscreteMeasure& mu, double delta) {
    if (!(delta > 0.0))
        throw std::invalid_argument("entropy_delta needs delta > 0");
    if (mu.has_atoms())
        throw AtomicMeasure("regularized entropy needs an absolutely continuous measure");
    const Grid& g = *mu.grid;
    double s = 0.0;
    for (int i = 0; i < g.node_count(); ++i)
        s += g.lumped()[i] * mu.density[i] * std::log(mu.density[i] + delta);
    return s;
}

double fisher_information(const DiscreteMeasure& mu, const FisherOptions& opt) {
    if (mu.has_atoms())
        return kInf;
    const Grid& g = *mu.grid;
    GridFunction f(g, mu.density);
    EdgeFunction grad = gradient(f);
    double total = 0.0;
    for (int e = 0; e < g.graph().edge_count(); ++e) {
        int n = g.nodes_on_edge(e);
        double h = g.spacing(e);
        for (int i = 0; i < n; ++i) {
            double u = mu.density[g.edge_node(e, i)];
            double v = grad.per_edge[e][i];
            double w = (i == 0 || i == n - 1) ? h / 2.0 : h;
            if (u > opt.density_floor) {
                total += w * v * v / u;
            } else if (std::abs(v) > opt.gradient_floor) {
                return kInf;
            }
        }
    }
    return total;
}

LipschitzConstants lipschitz_constants(const GridFunction& f) {
    const Grid& g = *f.grid;
    LipschitzConstants out;
    out.local = Eigen::VectorXd::Zero(g.node_count());
    for (int e = 0; e < g.graph().edge_count(); ++e) {
        int n = g.nodes_on_edge(e);
        double h = g.spacing(e);
        for (int i = 0; i + 1 < n; ++i) {
            double q = std::abs(f.values[g.edge_node(e, i + 1)] -
                                f.values[g.edge_node(e, i)]) /
                       h;
            int a = g.edge_node(e, i);
            int b = g.edge_node(e, i + 1);
            out.local[a] = std::max(out.local[a], q);
            out.local[b] = std::max(out.local[b], q);
        }
    }
    out.global = 0.0;
    for (int i = 0; i < g.node_count(); ++i)
        for (int j = i + 1; j < g.node_count(); ++j) {
            double d = g.graph().distance(g.node_point(i), g.node_point(j));
            if (d > 0.0)
                out.global = std::max(out.global,
                                      std::abs(f.values[i] - f.values[j]) / d);
        }
    return out;
}

Functionals evaluate_functionals(const DiscreteMeasure& mu) {
    Functionals out;
    GridFunction f(*mu.grid, mu.density);
    out.dirichlet = dirichlet_energy(f);
    out.entropy = entropy(mu);
    out.fisher = fisher_information(mu);
    return out;
}

} // namespace mgc
