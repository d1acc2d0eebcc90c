#include "mgc/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace mgc {

namespace {
constexpr double kPointTol = 1e-12;
constexpr double kPathTol = 1e-9;
} // namespace

MetricGraph MetricGraph::build(int vertex_count, std::vector<Edge> edges) {
    MetricGraph g;
    if (vertex_count <= 0)
        throw DanglingVertexReference("graph needs at least one vertex");
    g.vertex_count_ = vertex_count;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw NonpositiveLength("edge " + std::to_string(i) + " has nonpositive length");
        if (e.tail < 0 || e.tail >= vertex_count || e.head < 0 || e.head >= vertex_count)
            throw DanglingVertexReference("edge " + std::to_string(i) +
                                          " references an unknown vertex");
    }
    g.edges_ = std::move(edges);
    g.incident_.assign(vertex_count, {});
    g.total_length_ = 0.0;
    g.min_length_ = std::numeric_limits<double>::infinity();
    for (int e = 0; e < g.edge_count(); ++e) {
        g.incident_[g.edges_[e].tail].push_back({e, false});
        g.incident_[g.edges_[e].head].push_back({e, true});
        g.total_length_ += g.edges_[e].length;
        g.min_length_ = std::min(g.min_length_, g.edges_[e].length);
    }
    g.deg_max_ = 0;
    for (int v = 0; v < vertex_count; ++v)
        g.deg_max_ = std::max(g.deg_max_, g.degree(v));

    // connectivity
    std::vector<char> seen(vertex_count, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const Incidence& inc : g.incident_[v]) {
            int w = g.end_vertex(inc.edge, !inc.at_head);
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                q.push(w);
            }
        }
    }
    if (reached != vertex_count)
        throw DisconnectedGraph("graph is not connected");

    // all-pairs vertex distances (Floyd-Warshall; multi-edges take the min)
    const double inf = std::numeric_limits<double>::infinity();
    g.vdist_.assign(vertex_count, std::vector<double>(vertex_count, inf));
    for (int v = 0; v < vertex_count; ++v)
        g.vdist_[v][v] = 0.0;
    for (const Edge& e : g.edges_) {
        if (e.tail == e.head)
            continue;
        double& d = g.vdist_[e.tail][e.head];
        d = std::min(d, e.length);
        g.vdist_[e.head][e.tail] = d;
    }
    for (int k = 0; k < vertex_count; ++k)
        for (int i = 0; i < vertex_count; ++i)
            for (int j = 0; j < vertex_count; ++j) {
                double via = g.vdist_[i][k] + g.vdist_[k][j];
                if (via < g.vdist_[i][j])
                    g.vdist_[i][j] = via;
            }
    return g;
}

void MetricGraph::check_point(const GraphPoint& p) const {
    if (p.edge < 0 || p.edge >= edge_count())
        throw std::out_of_range("graph point on unknown edge");
    double half = edges_[p.edge].length / 2.0;
    if (!(p.s >= -half - kPointTol && p.s <= half + kPointTol))
        throw std::out_of_range("graph point coordinate outside edge interval");
}

std::optional<int> MetricGraph::vertex_of(const GraphPoint& p) const {
    const Edge& e = edges_[p.edge];
    double half = e.length / 2.0;
    double tol = kPointTol * (1.0 + e.length);
    if (std::abs(p.s + half) <= tol)
        return e.tail;
    if (std::abs(p.s - half) <= tol)
        return e.head;
    return std::nullopt;
}

GraphPoint MetricGraph::vertex_point(int v) const {
    const Incidence& inc = incident_[v].front();
    const Edge& e = edges_[inc.edge];
    return {inc.edge, inc.at_head ? e.length / 2.0 : -e.length / 2.0};
}

bool MetricGraph::same_point(const GraphPoint& x, const GraphPoint& y) const {
    auto vx = vertex_of(x);
    auto vy = vertex_of(y);
    if (vx && vy)
        return *vx == *vy;
    if (vx || vy)
        return false;
    return x.edge == y.edge && std::abs(x.s - y.s) <= kPointTol * (1.0 + edges_[x.edge].length);
}

double MetricGraph::distance(const GraphPoint& x, const GraphPoint& y) const {
    // Canonical argument order keeps the result bit-symmetric.
    if (y.edge < x.edge || (y.edge == x.edge && y.s < x.s))
        return distance(y, x);
    check_point(x);
    check_point(y);
    double best = std::numeric_limits<double>::infinity();
    if (x.edge == y.edge)
        best = std::abs(x.s - y.s);
    const Edge& ex = edges_[x.edge];
    const Edge& ey = edges_[y.edge];
    const double hx = ex.length / 2.0, hy = ey.length / 2.0;
    const double to_end_x[2] = {x.s + hx, hx - x.s}; // to tail, to head
    const double to_end_y[2] = {y.s + hy, hy - y.s};
    const int vx[2] = {ex.tail, ex.head};
    const int vy[2] = {ey.tail, ey.head};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double len = to_end_x[a] + vdist_[vx[a]][vy[b]] + to_end_y[b];
            if (len < best)
                best = len;
        }
    return best;
}

std::vector<int> MetricGraph::lex_vertex_path(int a, int b) const {
    std::vector<int> seq;
    int cur = a;
    while (cur != b) {
        int best_edge = -1;
        int best_next = -1;
        double best_len = std::numeric_limits<double>::infinity();
        for (const Incidence& inc : incident_[cur]) {
            int w = end_vertex(inc.edge, !inc.at_head);
            if (w == cur)
                continue; // self-loops never shorten a path
            double len = edges_[inc.edge].length + vdist_[w][b];
            bool better = len < best_len - kPathTol;
            bool tie_smaller_id =
                len <= best_len + kPathTol && best_edge >= 0 && inc.edge < best_edge;
            if (best_edge < 0 || better || tie_smaller_id) {
                best_len = std::min(best_len, len);
                best_edge = inc.edge;
                best_next = w;
            }
        }
        seq.push_back(best_edge);
        cur = best_next;
    }
    return seq;
}

MetricGraph::PathCandidate MetricGraph::shortest_path(const GraphPoint& x,
                                                      const GraphPoint& y) const {
    PathCandidate best;
    auto consider = [&](PathCandidate cand) {
        if (!best.valid) {
            best = std::move(cand);
            return;
        }
        if (cand.length < best.length - kPathTol) {
            best = std::move(cand);
            return;
        }
        if (cand.length <= best.length + kPathTol && cand.edge_seq < best.edge_seq)
            best = std::move(cand);
    };

    if (x.edge == y.edge) {
        PathCandidate direct;
        direct.valid = true;
        direct.length = std::abs(x.s - y.s);
        direct.segments.push_back({x.edge, x.s, y.s});
        direct.edge_seq.push_back(x.edge);
        consider(std::move(direct));
    }

    const Edge& ex = edges_[x.edge];
    const Edge& ey = edges_[y.edge];
    const double hx = ex.length / 2.0, hy = ey.length / 2.0;
    struct End {
        int vertex;
        double coord;
    };
    const End ends_x[2] = {{ex.tail, -hx}, {ex.head, hx}};
    const End ends_y[2] = {{ey.tail, -hy}, {ey.head, hy}};
    for (const End& a : ends_x)
        for (const End& b : ends_y) {
            PathCandidate cand;
            cand.valid = true;
            cand.length = std::abs(x.s - a.coord) + vdist_[a.vertex][b.vertex] +
                          std::abs(y.s - b.coord);
            cand.segments.push_back({x.edge, x.s, a.coord});
            cand.edge_seq.push_back(x.edge);
            int cur = a.vertex;
            for (int e : lex_vertex_path(a.vertex, b.vertex)) {
                const Edge& ed = edges_[e];
                double h = ed.length / 2.0;
                bool forward = (ed.tail == cur);
                cand.segments.push_back({e, forward ? -h : h, forward ? h : -h});
                cand.edge_seq.push_back(e);
                cur = forward ? ed.head : ed.tail;
            }
            cand.segments.push_back({y.edge, b.coord, y.s});
            cand.edge_seq.push_back(y.edge);
            consider(std::move(cand));
        }
    return best;
}

GraphPoint MetricGraph::geodesic_point(const GraphPoint& x, const GraphPoint& y,
                                       double s) const {
    check_point(x);
    check_point(y);
    if (s <= 0.0)
        return x;
    if (s >= 1.0)
        return y;
    PathCandidate path = shortest_path(x, y);
    double target = s * path.length;
    double walked = 0.0;
    for (const PathSegment& seg : path.segments) {
        double len = std::abs(seg.to - seg.from);
        if (walked + len >= target - kPointTol && len > 0.0) {
            double frac = (target - walked) / len;
            frac = std::clamp(frac, 0.0, 1.0);
            return {seg.edge, seg.from + frac * (seg.to - seg.from)};
        }
        walked += len;
    }
    return y;
}

GraphExtension extend_graph(const MetricGraph& g, double eps) {
    if (!(eps > 0.0))
        throw NonpositiveLength("extension requires eps > 0");
    GraphExtension ext;
    ext.eps = eps;
    ext.original_vertices = g.vertex_count();
    ext.original_edges = g.edge_count();
    std::vector<Edge> edges = g.edges();
    ext.pendant_edge.resize(g.vertex_count());
    ext.pendant_vertex.resize(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) {
        ext.pendant_vertex[v] = g.vertex_count() + v;
        ext.pendant_edge[v] = static_cast<int>(edges.size());
        edges.push_back({v, ext.pendant_vertex[v], 2.0 * eps});
    }
    ext.graph = MetricGraph::build(2 * g.vertex_count(), std::move(edges));
    return ext;
}

} // namespace mgc
