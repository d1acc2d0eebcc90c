#include "mgc/regularization.hpp"

#include "mgc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mgc {

namespace {

// Piecewise-linear value of f restricted to edge e at coordinate x.
double edge_value(const Grid& grid, const Eigen::VectorXd& values, int e, double x) {
    const Edge& ed = grid.graph().edge(e);
    double h = grid.spacing(e);
    double offset = (x + ed.length / 2.0) / h;
    int cell = std::clamp(static_cast<int>(std::floor(offset)), 0,
                          grid.nodes_on_edge(e) - 2);
    double w = std::clamp(offset - cell, 0.0, 1.0);
    return (1.0 - w) * values[grid.edge_node(e, cell)] +
           w * values[grid.edge_node(e, cell + 1)];
}

// Exact integral of the piecewise-linear interpolant over [a, b] on edge e.
double edge_integral(const Grid& grid, const Eigen::VectorXd& values, int e, double a,
                     double b) {
    const Edge& ed = grid.graph().edge(e);
    double half = ed.length / 2.0;
    a = std::max(a, -half);
    b = std::min(b, half);
    if (b <= a)
        return 0.0;
    double h = grid.spacing(e);
    int n = grid.nodes_on_edge(e);
    double total = 0.0;
    int first = std::clamp(static_cast<int>(std::floor((a + half) / h)), 0, n - 2);
    for (int cell = first; cell < n - 1; ++cell) {
        double lo = std::max(a, -half + cell * h);
        double hi = std::min(b, -half + (cell + 1) * h);
        if (hi <= lo) {
            if (lo >= b)
                break;
            continue;
        }
        double flo = edge_value(grid, values, e, lo);
        double fhi = edge_value(grid, values, e, hi);
        total += 0.5 * (flo + fhi) * (hi - lo);
    }
    return total;
}

} // namespace

RegularizationMap::RegularizationMap(const MetricGraph& base, double eps, double target_h)
    : base_(base), ext_(extend_graph(base, eps)), eps_(eps),
      base_grid_(base, target_h), ext_grid_(ext_.graph, target_h) {
    alpha_.resize(base.edge_count());
    for (int e = 0; e < base.edge_count(); ++e)
        alpha_[e] = (base.edge(e).length + 2.0 * eps) / base.edge(e).length;
}

GraphPoint RegularizationMap::chart_point(int e, double xi) const {
    const Edge& ed = base_.edge(e);
    double half = ed.length / 2.0;
    if (xi < -half) {
        double t = std::min(-half - xi, 2.0 * eps_);
        return {ext_.pendant_edge[ed.tail], -eps_ + t};
    }
    if (xi > half) {
        double t = std::min(xi - half, 2.0 * eps_);
        return {ext_.pendant_edge[ed.head], -eps_ + t};
    }
    return {e, xi};
}

double RegularizationMap::regularized_value(const GridFunction& phi_ext, int e,
                                            double x) const {
    const Edge& ed = base_.edge(e);
    double half = ed.length / 2.0;
    double a = alpha_[e] * x - eps_;
    double b = alpha_[e] * x + eps_;
    double total = 0.0;
    if (a < -half) {
        // tail pendant: chart xi in [a, -half] maps to distance -half - xi from
        // the vertex, i.e. pendant coordinates [-eps, -eps + (-half - a)]
        int p = ext_.pendant_edge[ed.tail];
        total += edge_integral(ext_grid_, phi_ext.values, p, -eps_, -eps_ + (-half - a));
    }
    total += edge_integral(ext_grid_, phi_ext.values, e, std::max(a, -half),
                           std::min(b, half));
    if (b > half) {
        int p = ext_.pendant_edge[ed.head];
        total += edge_integral(ext_grid_, phi_ext.values, p, -eps_, -eps_ + (b - half));
    }
    return total / (2.0 * eps_);
}

double RegularizationMap::regularized_derivative(const GridFunction& phi_ext, int e,
                                                 double x) const {
    GraphPoint right = chart_point(e, alpha_[e] * x + eps_);
    GraphPoint left = chart_point(e, alpha_[e] * x - eps_);
    return alpha_[e] / (2.0 * eps_) *
           (phi_ext(right) - phi_ext(left));
}

GridFunction RegularizationMap::regularize_function(const GridFunction& phi_ext) const {
    if (!phi_ext.grid->same_as(ext_grid_))
        throw GridMismatch("function must live on the extended grid");
    GridFunction out(base_grid_);
    for (int e = 0; e < base_.edge_count(); ++e)
        for (int i = 0; i < base_grid_.nodes_on_edge(e); ++i)
            out.values[base_grid_.edge_node(e, i)] =
                regularized_value(phi_ext, e, base_grid_.node_coord(e, i));
    return out;
}

double RegularizationMap::window_mass(const DiscreteMeasure& mu, int e, double c0,
                                      double c1) const {
    const Edge& ed = base_.edge(e);
    double half = ed.length / 2.0;
    double al = alpha_[e];
    // overlap length of (c0, c1) with the moving window (al*y - eps, al*y + eps)
    auto hat = [&](double y) {
        return std::max(0.0, std::min(c1, al * y + eps_) - std::max(c0, al * y - eps_));
    };
    // integration knots: the hat's kinks plus the density's own grid nodes,
    // restricted to the hat's support
    double support_lo = std::max(-half, (c0 - eps_) / al);
    double support_hi = std::min(half, (c1 + eps_) / al);
    if (support_hi <= support_lo) {
        // outside the window; atoms below still see a zero hat
        support_lo = support_hi = -half;
    }
    std::vector<double> knots = {support_lo, support_hi, (c0 + eps_) / al,
                                 (c1 - eps_) / al};
    const Grid& g = *mu.grid;
    for (int i = 0; i < g.nodes_on_edge(e); ++i)
        knots.push_back(g.node_coord(e, i));
    std::sort(knots.begin(), knots.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        double lo = std::max(knots[k], support_lo);
        double hi = std::min(knots[k + 1], support_hi);
        if (hi - lo <= 1e-15)
            continue;
        double mid = 0.5 * (lo + hi);
        // Simpson is exact: (hat * density) is quadratic between knots
        double glo = hat(lo) * edge_value(g, mu.density, e, lo);
        double gmid = hat(mid) * edge_value(g, mu.density, e, mid);
        double ghi = hat(hi) * edge_value(g, mu.density, e, hi);
        total += (hi - lo) / 6.0 * (glo + 4.0 * gmid + ghi);
    }
    for (const Atom& a : mu.atoms) {
        if (a.point.edge != e || a.mass <= 0.0)
            continue;
        if (base_.vertex_of(a.point))
            continue; // vertex atoms enter through the pendant branch
        total += hat(a.point.s) * a.mass;
    }
    return total / (2.0 * eps_);
}

DiscreteMeasure RegularizationMap::regularize_measure(const DiscreteMeasure& mu) const {
    // any grid over a structurally identical base graph is accepted
    const MetricGraph& mg = mu.grid->graph();
    if (mg.edge_count() != base_.edge_count() || mg.vertex_count() != base_.vertex_count())
        throw GridMismatch("measure lives on a different graph");
    for (int e = 0; e < base_.edge_count(); ++e)
        if (mg.edge(e).length != base_.edge(e).length ||
            mg.edge(e).tail != base_.edge(e).tail || mg.edge(e).head != base_.edge(e).head)
            throw GridMismatch("measure lives on a different graph");
    const Grid& eg = ext_grid_;
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(eg.node_count());
    for (int ee = 0; ee < ext_.graph.edge_count(); ++ee) {
        int n = eg.nodes_on_edge(ee);
        double h = eg.spacing(ee);
        double half = ext_.graph.edge(ee).length / 2.0;
        bool pendant = ee >= ext_.original_edges;
        int pendant_owner = pendant ? ext_.graph.edge(ee).tail : -1;
        for (int i = 0; i < n; ++i) {
            double c0 = std::max(-half, eg.node_coord(ee, i) - h / 2.0);
            double c1 = std::min(half, eg.node_coord(ee, i) + h / 2.0);
            double cell_mass = 0.0;
            if (!pendant) {
                cell_mass = window_mass(mu, ee, c0, c1);
            } else {
                int v = pendant_owner;
                double t0 = c0 + eps_; // distance from the vertex
                double t1 = c1 + eps_;
                for (const Atom& a : mu.atoms) {
                    auto av = base_.vertex_of(a.point);
                    if (av && *av == v && a.mass > 0.0)
                        cell_mass += a.mass * (t1 - t0) / (2.0 * eps_);
                }
                for (const Incidence& inc : base_.incident(v)) {
                    double bhalf = base_.edge(inc.edge).length / 2.0;
                    double x0, x1;
                    if (inc.at_head) {
                        x0 = bhalf + t0;
                        x1 = bhalf + t1;
                    } else {
                        x0 = -bhalf - t1;
                        x1 = -bhalf - t0;
                    }
                    cell_mass += window_mass(mu, inc.edge, x0, x1);
                }
            }
            mass[eg.edge_node(ee, i)] += cell_mass;
        }
    }
    DiscreteMeasure out(eg);
    out.density = mass.cwiseQuotient(eg.lumped());
    return out;
}

ActionTransferReport action_transfer_check(const MeasureCurve& curve,
                                           const RegularizationMap& map, double tol,
                                           W2Method method) {
    ActionTransferReport rep;
    rep.eps = map.eps();
    rep.bound = 1.0 + 2.0 * map.eps() / map.base().min_edge_length();
    MeasureCurve reg;
    reg.times = curve.times;
    for (const DiscreteMeasure& mu : curve.measures)
        reg.measures.push_back(map.regularize_measure(mu));
    rep.pass = true;
    for (int i = 0; i + 1 < curve.count(); ++i) {
        double base_speed = metric_derivative(curve, i, method);
        double ext_speed = metric_derivative(reg, i, method);
        if (base_speed <= tol && ext_speed <= tol)
            continue; // constant piece, 0/0 counts as a pass
        double ratio = base_speed > 0.0
                           ? ext_speed / base_speed
                           : std::numeric_limits<double>::infinity();
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        double excess = ext_speed - (rep.bound * base_speed + tol);
        rep.worst_excess = std::max(rep.worst_excess, excess);
        if (excess > 0.0)
            rep.pass = false;
    }
    return rep;
}

std::vector<double> mollifier_weights(double k, double dt) {
    int radius = static_cast<int>(std::floor(1.0 / (k * dt) + 1e-9));
    std::vector<double> w(2 * radius + 1, 0.0);
    double sum = 0.0;
    for (int j = -radius; j <= radius; ++j) {
        double tau = k * j * dt;
        double val = std::abs(tau) < 1.0 ? std::exp(-1.0 / (1.0 - tau * tau)) : 0.0;
        w[j + radius] = val;
        sum += val;
    }
    for (double& x : w)
        x /= sum;
    return w;
}

MeasureCurve mollify_in_time(const MeasureCurve& curve, double k) {
    if (curve.count() < 2)
        return curve;
    double dt = curve.times[1] - curve.times[0];
    for (int i = 0; i + 1 < curve.count(); ++i)
        if (std::abs(curve.times[i + 1] - curve.times[i] - dt) > 1e-9 * (1.0 + dt))
            throw std::invalid_argument("mollify_in_time needs uniform time samples");
    for (const DiscreteMeasure& mu : curve.measures)
        if (mu.has_atoms())
            throw AtomicMeasure("mollify_in_time needs density curves");
    std::vector<double> w = mollifier_weights(k, dt);
    int radius = static_cast<int>(w.size() / 2);
    MeasureCurve out;
    out.times = curve.times;
    const int n = curve.count();
    for (int i = 0; i < n; ++i) {
        DiscreteMeasure mixed(*curve.measures[0].grid);
        for (int j = -radius; j <= radius; ++j) {
            int src = std::clamp(i - j, 0, n - 1); // constant extension in time
            mixed.density += w[j + radius] * curve.measures[src].density;
        }
        out.measures.push_back(std::move(mixed));
    }
    return out;
}

StronglyRegularCurve strongly_regular_approx(const MeasureCurve& curve, int n,
                                             double target_h) {
    if (n < 1)
        throw std::invalid_argument("approximation index must be positive");
    StronglyRegularCurve out;
    out.n = n;
    out.map = std::make_shared<RegularizationMap>(curve.measures[0].grid->graph(),
                                                  1.0 / n, target_h);
    MeasureCurve reg;
    reg.times = curve.times;
    for (const DiscreteMeasure& mu : curve.measures)
        reg.measures.push_back(out.map->regularize_measure(mu));
    out.curve = mollify_in_time(reg, static_cast<double>(n));
    for (int i = 0; i + 1 < out.curve.count(); ++i) {
        double dt = out.curve.times[i + 1] - out.curve.times[i];
        out.time_derivative.push_back(
            (out.curve.measures[i + 1].density - out.curve.measures[i].density) / dt);
    }
    return out;
}

} // namespace mgc
