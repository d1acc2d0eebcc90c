#include "mgc/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mgc {

Grid::Grid(const MetricGraph& graph, double target_h)
    : graph_(std::make_shared<MetricGraph>(graph)) {
    if (!(target_h > 0.0))
        throw std::invalid_argument("target_h must be positive");
    const MetricGraph& g = *graph_;
    vertex_node_.resize(g.vertex_count());
    node_point_.reserve(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) {
        vertex_node_[v] = v;
        node_point_.push_back(g.vertex_point(v));
    }
    node_count_ = g.vertex_count();
    edge_nodes_.resize(g.edge_count());
    spacing_.resize(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        int cells = std::max(1, static_cast<int>(std::ceil(ed.length / target_h - 1e-9)));
        int n = cells + 1;
        spacing_[e] = ed.length / cells;
        max_spacing_ = std::max(max_spacing_, spacing_[e]);
        edge_nodes_[e].resize(n);
        edge_nodes_[e][0] = vertex_node_[ed.tail];
        edge_nodes_[e][n - 1] = vertex_node_[ed.head];
        for (int i = 1; i + 1 < n; ++i) {
            edge_nodes_[e][i] = node_count_++;
            node_point_.push_back({e, node_coord(e, i)});
        }
    }
    lumped_ = Eigen::VectorXd::Zero(node_count_);
    for (int e = 0; e < g.edge_count(); ++e) {
        int n = nodes_on_edge(e);
        double h = spacing_[e];
        for (int i = 0; i < n; ++i)
            lumped_[edge_nodes_[e][i]] += (i == 0 || i == n - 1) ? h / 2.0 : h;
    }
}

double Grid::node_coord(int e, int i) const {
    const Edge& ed = graph_->edge(e);
    return -ed.length / 2.0 + i * spacing_[e];
}

Grid::InterpWeights Grid::locate(const GraphPoint& p) const {
    graph_->check_point(p);
    if (auto v = graph_->vertex_of(p)) {
        int n = vertex_node_[*v];
        return {n, n, 0.0};
    }
    const Edge& ed = graph_->edge(p.edge);
    double h = spacing_[p.edge];
    double offset = (p.s + ed.length / 2.0) / h;
    int cell = std::clamp(static_cast<int>(std::floor(offset)), 0,
                          nodes_on_edge(p.edge) - 2);
    double w1 = std::clamp(offset - cell, 0.0, 1.0);
    return {edge_nodes_[p.edge][cell], edge_nodes_[p.edge][cell + 1], w1};
}

double Grid::interpolate(const Eigen::VectorXd& values, const GraphPoint& p) const {
    InterpWeights w = locate(p);
    return (1.0 - w.w1) * values[w.i0] + w.w1 * values[w.i1];
}

Grid discretize(const MetricGraph& graph, double target_h) {
    return Grid(graph, target_h);
}

double integrate(const GridFunction& f) {
    return f.grid->lumped().dot(f.values);
}

} // namespace mgc
