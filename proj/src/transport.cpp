#include "mgc/transport.hpp"

#include "mgc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace mgc {

namespace {

// ---------------------------------------------------------------------------
// Transportation simplex on a dense cost matrix. The basis is maintained as a
// spanning tree over the n + m bipartite nodes. Entering arc: most negative
// reduced cost (smallest index on ties); after a long run of degenerate
// pivots the entering rule switches to Bland's rule, which guarantees
// termination.
// ---------------------------------------------------------------------------
class TransportSimplex {
public:
    TransportSimplex(const Eigen::MatrixXd& cost, Eigen::VectorXd a, Eigen::VectorXd b)
        : cost_(cost), a_(std::move(a)), b_(std::move(b)),
          n_(static_cast<int>(a_.size())), m_(static_cast<int>(b_.size())) {}

    void solve() {
        build_initial_basis();
        const double tol = 1e-12 * std::max(1.0, cost_.cwiseAbs().maxCoeff());
        const long max_pivots = 2000L * (n_ + m_) * (n_ + m_) + 10000L;
        long degenerate_run = 0;
        bool bland = false;
        for (long pivot = 0;; ++pivot) {
            if (pivot > max_pivots)
                throw SolverFailure("transportation simplex exceeded pivot budget");
            compute_potentials();
            int entering = bland ? find_entering_bland(tol) : find_entering(tol);
            if (entering < 0)
                break;
            double theta = pivot_on(entering / m_, entering % m_);
            if (theta <= 0.0) {
                if (++degenerate_run > 20L * (n_ + m_))
                    bland = true;
            } else {
                degenerate_run = 0;
            }
        }
    }

    double objective() const {
        double s = 0.0;
        for (int k = 0; k < arc_count(); ++k)
            s += flow_[k] * cost_(arc_i_[k], arc_j_[k]);
        return s;
    }

    double dual_objective() const { return u_.dot(a_) + v_.dot(b_); }

    template <typename F>
    void for_each_flow(F&& fn) const {
        for (int k = 0; k < arc_count(); ++k)
            if (flow_[k] > 0.0)
                fn(arc_i_[k], arc_j_[k], flow_[k]);
    }

private:
    int arc_count() const { return static_cast<int>(arc_i_.size()); }
    int source_node(int i) const { return i; }
    int sink_node(int j) const { return n_ + j; }

    // Partial pricing: a full scan refills a candidate list of the most
    // negative arcs; pivots between refreshes price only the candidates.
    int find_entering(double tol) {
        double worst = -tol;
        int best = -1;
        std::size_t keep = 0;
        for (int code : candidates_) {
            double r = cost_(code / m_, code % m_) - u_[code / m_] - v_[code % m_];
            if (r < -tol) {
                candidates_[keep++] = code;
                if (r < worst) {
                    worst = r;
                    best = code;
                }
            }
        }
        candidates_.resize(keep);
        if (best >= 0)
            return best;
        std::vector<std::pair<double, int>> found;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < m_; ++j) {
                double r = cost_(i, j) - u_[i] - v_[j];
                if (r < -tol)
                    found.emplace_back(r, i * m_ + j);
            }
        if (found.empty())
            return -1;
        std::size_t list = std::min<std::size_t>(found.size(), 64);
        std::partial_sort(found.begin(), found.begin() + list, found.end());
        candidates_.clear();
        for (std::size_t k = 0; k < list; ++k)
            candidates_.push_back(found[k].second);
        return found[0].second;
    }

    int find_entering_bland(double tol) const {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < m_; ++j)
                if (cost_(i, j) - u_[i] - v_[j] < -tol)
                    return i * m_ + j;
        return -1;
    }

    void add_arc(int i, int j, double f) {
        int k = arc_count();
        arc_i_.push_back(i);
        arc_j_.push_back(j);
        flow_.push_back(f);
        adj_[source_node(i)].push_back(k);
        adj_[sink_node(j)].push_back(k);
    }

    void build_initial_basis() {
        adj_.assign(n_ + m_, {});
        arc_i_.clear();
        arc_j_.clear();
        flow_.clear();
        // Row-minimum rule: each row fills its cheapest remaining columns.
        // Every allocation crosses out exactly one exhausted line, which keeps
        // the n + m - 1 arcs a spanning tree just like the northwest-corner
        // scheme, but the start is much closer to optimal.
        Eigen::VectorXd ra = a_, rb = b_;
        std::vector<char> row_done(n_, 0), col_done(m_, 0);
        int rows_left = n_, cols_left = m_;
        int i = 0;
        while (arc_count() < n_ + m_ - 1) {
            while (row_done[i])
                ++i;
            int j = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int jj = 0; jj < m_; ++jj)
                if (!col_done[jj] && cost_(i, jj) < best) {
                    best = cost_(i, jj);
                    j = jj;
                }
            double f = std::min(ra[i], rb[j]);
            add_arc(i, j, f);
            ra[i] -= f;
            rb[j] -= f;
            // Cross out exactly one exhausted line; never the last line of a
            // side while the other side still has several (guards rounding
            // dust in the residuals).
            bool cross_row;
            if (rows_left == 1)
                cross_row = false;
            else if (cols_left == 1)
                cross_row = true;
            else
                cross_row = ra[i] <= rb[j];
            if (cross_row) {
                row_done[i] = 1;
                --rows_left;
            } else {
                col_done[j] = 1;
                --cols_left;
            }
        }
        u_.resize(n_);
        v_.resize(m_);
    }

    void compute_potentials() {
        std::vector<char> done(n_ + m_, 0);
        std::queue<int> q;
        u_[0] = 0.0;
        done[source_node(0)] = 1;
        q.push(source_node(0));
        while (!q.empty()) {
            int node = q.front();
            q.pop();
            for (int k : adj_[node]) {
                int other = (node < n_) ? sink_node(arc_j_[k]) : source_node(arc_i_[k]);
                if (done[other])
                    continue;
                if (node < n_)
                    v_[arc_j_[k]] = cost_(arc_i_[k], arc_j_[k]) - u_[node];
                else
                    u_[arc_i_[k]] = cost_(arc_i_[k], arc_j_[k]) - v_[node - n_];
                done[other] = 1;
                q.push(other);
            }
        }
    }

    // Adds arc (ei, ej) to the tree, pushes flow around the unique cycle and
    // removes the limiting arc. Returns the amount of flow moved.
    double pivot_on(int ei, int ej) {
        // path from source ei to sink ej through the tree
        std::vector<int> parent_arc(n_ + m_, -1);
        std::vector<int> parent_node(n_ + m_, -1);
        std::vector<char> seen(n_ + m_, 0);
        std::queue<int> q;
        int start = source_node(ei), goal = sink_node(ej);
        seen[start] = 1;
        q.push(start);
        while (!q.empty() && !seen[goal]) {
            int node = q.front();
            q.pop();
            for (int k : adj_[node]) {
                int other = (node < n_) ? sink_node(arc_j_[k]) : source_node(arc_i_[k]);
                if (seen[other])
                    continue;
                seen[other] = 1;
                parent_arc[other] = k;
                parent_node[other] = node;
                q.push(other);
            }
        }
        if (!seen[goal])
            throw SolverFailure("basis lost connectivity");
        // Walk goal -> start; arcs alternate -theta, +theta beginning with
        // the arc incident to the entering sink.
        std::vector<int> path;
        for (int node = goal; node != start; node = parent_node[node])
            path.push_back(parent_arc[node]);
        // Leaving arc: minimum flow among the decreasing arcs; ties resolved
        // by the (i, j) code so the Bland fallback has a fixed variable order.
        double theta = std::numeric_limits<double>::infinity();
        int leaving = -1;
        long leaving_code = -1;
        for (std::size_t idx = 0; idx < path.size(); idx += 2) {
            int k = path[idx];
            long code = static_cast<long>(arc_i_[k]) * m_ + arc_j_[k];
            if (flow_[k] < theta ||
                (flow_[k] == theta && (leaving < 0 || code < leaving_code))) {
                theta = std::min(theta, flow_[k]);
                leaving = k;
                leaving_code = code;
            }
        }
        for (std::size_t idx = 0; idx < path.size(); ++idx)
            flow_[path[idx]] += (idx % 2 == 0) ? -theta : theta;
        // replace the leaving arc in place
        detach(leaving);
        arc_i_[leaving] = ei;
        arc_j_[leaving] = ej;
        flow_[leaving] = theta;
        adj_[source_node(ei)].push_back(leaving);
        adj_[sink_node(ej)].push_back(leaving);
        return theta;
    }

    void detach(int k) {
        auto remove = [&](int node) {
            auto& lst = adj_[node];
            lst.erase(std::find(lst.begin(), lst.end(), k));
        };
        remove(source_node(arc_i_[k]));
        remove(sink_node(arc_j_[k]));
    }

    const Eigen::MatrixXd& cost_;
    Eigen::VectorXd a_, b_;
    int n_, m_;
    std::vector<int> arc_i_, arc_j_;
    std::vector<int> candidates_;
    std::vector<double> flow_;
    std::vector<std::vector<int>> adj_;
    Eigen::VectorXd u_, v_;
};

} // namespace

W2Result w2_points(const MetricGraph& g, const std::vector<Atom>& a,
                   const std::vector<Atom>& b) {
    double sa = 0.0, sb = 0.0;
    for (const Atom& at : a)
        sa += at.mass;
    for (const Atom& at : b)
        sb += at.mass;
    if (std::abs(sa - sb) > 1e-12)
        throw MassMismatch("total masses differ by more than 1e-12");
    if (a.empty() || b.empty())
        throw MassMismatch("empty support");

    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    Eigen::VectorXd av(n), bv(m);
    for (int i = 0; i < n; ++i)
        av[i] = a[i].mass;
    for (int j = 0; j < m; ++j)
        bv[j] = b[j].mass;
    bv *= sa / sb; // remove the residual imbalance exactly

    Eigen::MatrixXd cost(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            double d = g.distance(a[i].point, b[j].point);
            cost(i, j) = d * d;
        }

    TransportSimplex simplex(cost, av, bv);
    simplex.solve();

    W2Result out;
    out.cost = simplex.objective();
    out.distance = std::sqrt(std::max(0.0, out.cost));
    out.duality_gap = std::abs(out.cost - simplex.dual_objective());
    out.plan.source = a;
    out.plan.target = b;
    simplex.for_each_flow([&](int i, int j, double f) {
        out.plan.entries.push_back({i, j, f});
    });
    return out;
}

W2Result w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (!mu.grid->same_as(*nu.grid))
        throw GridMismatch("w2 needs measures on the same grid");
    return w2_points(mu.grid->graph(), support_points(mu), support_points(nu));
}

// ---------------------------------------------------------------------------
// Quantile route on path graphs
// ---------------------------------------------------------------------------

bool is_path_graph(const MetricGraph& g) {
    if (g.edge_count() != g.vertex_count() - 1)
        return false;
    int deg1 = 0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (g.degree(v) > 2)
            return false;
        if (g.degree(v) == 1)
            ++deg1;
    }
    return deg1 == 2;
}

bool is_cycle_graph(const MetricGraph& g) {
    if (g.edge_count() != g.vertex_count())
        return false;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) != 2)
            return false;
    return true;
}

namespace {

// Piecewise-quadratic CDF of a piecewise-linear density along the arclength
// coordinate of a path graph.
struct PathCdf {
    std::vector<double> xi;   // knot positions
    std::vector<double> dens; // density at knots
    std::vector<double> cum;  // CDF at knots

    double total() const { return cum.back(); }

    double inverse(double q) const {
        if (q <= 0.0)
            return xi.front();
        if (q >= cum.back())
            return xi.back();
        auto it = std::upper_bound(cum.begin(), cum.end(), q);
        int k = static_cast<int>(it - cum.begin()) - 1;
        k = std::clamp(k, 0, static_cast<int>(xi.size()) - 2);
        while (k + 2 < static_cast<int>(xi.size()) && cum[k + 1] <= q)
            ++k;
        double c = q - cum[k];
        double dx = xi[k + 1] - xi[k];
        if (dx <= 0.0 || c <= 0.0)
            return xi[k];
        double f0 = dens[k];
        double slope = (dens[k + 1] - dens[k]) / dx;
        // solve f0 t + slope t^2 / 2 = c, stable for slope -> 0
        double disc = std::max(0.0, f0 * f0 + 2.0 * slope * c);
        double denom = f0 + std::sqrt(disc);
        double t = denom > 0.0 ? 2.0 * c / denom : dx;
        return xi[k] + std::min(t, dx);
    }
};

// Walks the chain (or cycle) edge by edge from start_vertex, accumulating
// arclength knots and the nodal density along the way.
PathCdf chain_cdf(const DiscreteMeasure& mu, int start_vertex) {
    const Grid& grid = *mu.grid;
    const MetricGraph& g = grid.graph();
    PathCdf cdf;
    double offset = 0.0;
    int vertex = start_vertex;
    std::vector<char> used(g.edge_count(), 0);
    cdf.xi.push_back(0.0);
    cdf.dens.push_back(mu.density[grid.vertex_node(vertex)]);
    cdf.cum.push_back(0.0);
    for (int step = 0; step < g.edge_count(); ++step) {
        int edge = -1;
        bool at_head = false;
        for (const Incidence& inc : g.incident(vertex))
            if (!used[inc.edge] && (edge < 0 || inc.edge < edge)) {
                edge = inc.edge;
                at_head = inc.at_head;
            }
        used[edge] = 1;
        int n = grid.nodes_on_edge(edge);
        double h = grid.spacing(edge);
        for (int i = 1; i < n; ++i) {
            int idx = at_head ? n - 1 - i : i; // traverse from this vertex outwards
            double xi_next = offset + i * h;
            double f_next = mu.density[grid.edge_node(edge, idx)];
            double f_prev = cdf.dens.back();
            cdf.cum.push_back(cdf.cum.back() + 0.5 * (f_prev + f_next) * h);
            cdf.xi.push_back(xi_next);
            cdf.dens.push_back(f_next);
        }
        offset += g.edge(edge).length;
        vertex = g.end_vertex(edge, !at_head);
    }
    return cdf;
}

PathCdf path_cdf(const DiscreteMeasure& mu) {
    const MetricGraph& g = mu.grid->graph();
    int start = -1;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) == 1) {
            start = v;
            break;
        }
    return chain_cdf(mu, start);
}

constexpr int kGaussN = 8;
constexpr double kGaussX[kGaussN] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kGaussW[kGaussN] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

} // namespace

double w2_quantile_path(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (!mu.grid->same_as(*nu.grid))
        throw GridMismatch("w2 needs measures on the same grid");
    if (!is_path_graph(mu.grid->graph()))
        throw std::invalid_argument("quantile route needs a path graph");
    if (mu.has_atoms() || nu.has_atoms())
        throw AtomicMeasure("quantile route needs absolutely continuous measures");

    PathCdf fa = path_cdf(mu);
    PathCdf fb = path_cdf(nu);
    double ma = fa.total(), mb = fb.total();
    if (std::abs(ma - mb) > 1e-12)
        throw MassMismatch("total masses differ by more than 1e-12");
    // scale the second CDF so both reach exactly the same total
    double scale = ma / mb;
    for (double& c : fb.cum)
        c *= scale;
    for (double& d : fb.dens)
        d *= scale;

    std::vector<double> breaks;
    breaks.reserve(fa.cum.size() + fb.cum.size());
    breaks.insert(breaks.end(), fa.cum.begin(), fa.cum.end());
    breaks.insert(breaks.end(), fb.cum.begin(), fb.cum.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-15; }),
                 breaks.end());

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        double qa = breaks[k], qb = breaks[k + 1];
        double w = qb - qa;
        if (w <= 1e-15)
            continue;
        // two subintervals of 8-point Gauss handle the square-root behaviour
        // of the quantile near vanishing densities
        for (int half = 0; half < 2; ++half) {
            double lo = qa + 0.5 * w * half;
            double mid = lo + 0.25 * w;
            for (int gp = 0; gp < kGaussN; ++gp) {
                double q = mid + 0.25 * w * kGaussX[gp];
                double diff = fa.inverse(q) - fb.inverse(q);
                total += 0.25 * w * kGaussW[gp] * diff * diff;
            }
        }
    }
    return std::sqrt(std::max(0.0, total));
}

double w2_quantile_cycle(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (!mu.grid->same_as(*nu.grid))
        throw GridMismatch("w2 needs measures on the same grid");
    if (!is_cycle_graph(mu.grid->graph()))
        throw std::invalid_argument("cyclic quantile route needs a cycle graph");
    if (mu.has_atoms() || nu.has_atoms())
        throw AtomicMeasure("quantile route needs absolutely continuous measures");
    const double L = mu.grid->graph().total_length();
    PathCdf fa = chain_cdf(mu, 0);
    PathCdf fb = chain_cdf(nu, 0);
    double ma = fa.total(), mb = fb.total();
    if (std::abs(ma - mb) > 1e-12)
        throw MassMismatch("total masses differ by more than 1e-12");
    auto norm = [](PathCdf& f) {
        double m = f.total();
        for (double& c : f.cum)
            c /= m;
        for (double& d : f.dens)
            d /= m;
    };
    norm(fa);
    norm(fb);

    // F^{-1} on the universal cover: F^{-1}(q + 1) = F^{-1}(q) + L
    auto inv_ext = [&](const PathCdf& f, double q) {
        double k = std::floor(q);
        return f.inverse(q - k) + k * L;
    };
    // q-breakpoints for a given rotation offset
    auto cost = [&](double theta) {
        std::vector<double> breaks = fa.cum;
        for (double c : fb.cum) {
            double q = c + theta;
            q -= std::floor(q);
            breaks.push_back(q);
        }
        breaks.push_back(0.0);
        breaks.push_back(1.0);
        std::sort(breaks.begin(), breaks.end());
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
            double qa = breaks[k], qb = breaks[k + 1];
            double w = qb - qa;
            if (w <= 1e-15)
                continue;
            double mid = qa + 0.5 * w;
            for (int gp = 0; gp < kGaussN; ++gp) {
                double q = mid + 0.5 * w * kGaussX[gp];
                double diff = inv_ext(fa, q) - inv_ext(fb, q - theta);
                total += 0.5 * w * kGaussW[gp] * diff * diff;
            }
        }
        return total;
    };

    // the cost is convex in the offset; coarse scan, then golden section
    double best_t = 0.0, best_cost = cost(0.0);
    for (int i = -16; i <= 16; ++i) {
        double t = i / 16.0;
        double ct = cost(t);
        if (ct < best_cost) {
            best_cost = ct;
            best_t = t;
        }
    }
    double lo = best_t - 1.0 / 16.0, hi = best_t + 1.0 / 16.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = cost(x1), f2 = cost(x2);
    for (int iter = 0; iter < 80; ++iter) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = cost(x2);
        }
    }
    best_cost = std::min({best_cost, f1, f2});
    return std::sqrt(std::max(0.0, best_cost));
}

bool has_exact_w2_route(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.has_atoms() || nu.has_atoms())
        return false;
    const MetricGraph& g = mu.grid->graph();
    return is_path_graph(g) || is_cycle_graph(g);
}

double w2_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, W2Method method) {
    if (method == W2Method::LP)
        return w2(mu, nu).distance;
    bool exact = has_exact_w2_route(mu, nu);
    if (method == W2Method::Auto && !exact)
        return w2(mu, nu).distance;
    if (is_path_graph(mu.grid->graph()))
        return w2_quantile_path(mu, nu);
    return w2_quantile_cycle(mu, nu);
}

namespace {

bool measures_equal(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (!a.grid->same_as(*b.grid) || a.atoms.size() != b.atoms.size())
        return false;
    if (a.density != b.density)
        return false;
    for (std::size_t k = 0; k < a.atoms.size(); ++k)
        if (a.atoms[k].mass != b.atoms[k].mass ||
            !a.grid->graph().same_point(a.atoms[k].point, b.atoms[k].point))
            return false;
    return true;
}

} // namespace

DiscreteMeasure wasserstein_geodesic(const DiscreteMeasure& mu0,
                                     const DiscreteMeasure& mu1, double s) {
    if (s <= 0.0 || measures_equal(mu0, mu1))
        return mu0;
    if (s >= 1.0)
        return mu1;
    const MetricGraph& g = mu0.grid->graph();
    W2Result res = w2(mu0, mu1);
    DiscreteMeasure out(*mu0.grid);
    for (const TransportPlan::Entry& en : res.plan.entries) {
        GraphPoint z = g.geodesic_point(res.plan.source[en.i].point,
                                        res.plan.target[en.j].point, s);
        out.atoms.push_back({z, en.mass});
    }
    return out;
}

double metric_derivative(const MeasureCurve& curve, int i, W2Method method) {
    int n = curve.count();
    if (n < 2)
        return 0.0;
    int a = std::min(i, n - 2);
    double dt = curve.times[a + 1] - curve.times[a];
    return w2_distance(curve.measures[a], curve.measures[a + 1], method) / dt;
}

double action(const MeasureCurve& curve, W2Method method) {
    double total = 0.0;
    for (int i = 0; i + 1 < curve.count(); ++i) {
        double dt = curve.times[i + 1] - curve.times[i];
        double speed = w2_distance(curve.measures[i], curve.measures[i + 1], method) / dt;
        total += speed * speed * dt;
    }
    return total;
}

Eigen::MatrixXd node_distance_matrix(const Grid& grid) {
    int n = grid.node_count();
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double v = grid.graph().distance(grid.node_point(i), grid.node_point(j));
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

GridFunction hopf_lax(const GridFunction& phi, double s, const HopfLaxOptions& opt) {
    if (!(s > 0.0))
        throw std::invalid_argument("hopf_lax needs s > 0");
    const Grid& grid = *phi.grid;
    Eigen::MatrixXd dist = node_distance_matrix(grid);
    GridFunction out(grid);
    for (int i = 0; i < grid.node_count(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < grid.node_count(); ++j) {
            double d = dist(i, j);
            double penalty = opt.quadratic_cost ? d * d / (2.0 * s) : d / (2.0 * s);
            best = std::min(best, phi.values[j] + penalty);
        }
        out.values[i] = best;
    }
    return out;
}

} // namespace mgc
