#pragma once

#include "mgc/metric_graph.hpp"

#include <Eigen/Core>

#include <memory>
#include <vector>

namespace mgc {

/// Per-edge uniform grid with shared vertex nodes. Every edge carries
/// n_e >= 2 nodes including both endpoints; endpoint nodes of edges meeting
/// at a vertex collapse to one flat index. The lumped weights are the
/// trapezoidal quadrature weights, so sum(lumped) equals the total length.
class Grid {
public:
    Grid() = default;
    Grid(const MetricGraph& graph, double target_h);

    const MetricGraph& graph() const { return *graph_; }
    int node_count() const { return node_count_; }
    int nodes_on_edge(int e) const { return static_cast<int>(edge_nodes_[e].size()); }
    int edge_node(int e, int i) const { return edge_nodes_[e][i]; }
    const std::vector<int>& edge_nodes(int e) const { return edge_nodes_[e]; }
    double spacing(int e) const { return spacing_[e]; }
    int vertex_node(int v) const { return vertex_node_[v]; }
    const Eigen::VectorXd& lumped() const { return lumped_; }
    double max_spacing() const { return max_spacing_; }

    /// Edge coordinate of the i-th node on edge e (tail = -len/2).
    double node_coord(int e, int i) const;

    /// Representative location of a flat node.
    GraphPoint node_point(int n) const { return node_point_[n]; }

    /// Piecewise-linear interpolation weights of p: two flat indices and the
    /// barycentric weight of the second one.
    struct InterpWeights {
        int i0;
        int i1;
        double w1;
    };
    InterpWeights locate(const GraphPoint& p) const;

    double interpolate(const Eigen::VectorXd& values, const GraphPoint& p) const;

    bool same_as(const Grid& other) const { return this == &other; }

private:
    std::shared_ptr<const MetricGraph> graph_;
    std::vector<std::vector<int>> edge_nodes_;
    std::vector<double> spacing_;
    std::vector<int> vertex_node_;
    std::vector<GraphPoint> node_point_;
    Eigen::VectorXd lumped_;
    int node_count_ = 0;
    double max_spacing_ = 0.0;
};

Grid discretize(const MetricGraph& graph, double target_h);

/// Real-valued function sampled at grid nodes; vertex values are
/// single-valued by construction.
struct GridFunction {
    const Grid* grid = nullptr;
    Eigen::VectorXd values;

    GridFunction() = default;
    GridFunction(const Grid& g)
        : grid(&g), values(Eigen::VectorXd::Zero(g.node_count())) {}
    GridFunction(const Grid& g, Eigen::VectorXd v) : grid(&g), values(std::move(v)) {}

    double operator()(const GraphPoint& p) const { return grid->interpolate(values, p); }
};

/// Samples a scalar field given in edge coordinates onto the grid. At shared
/// vertex nodes the last incident edge evaluated wins, so the field should be
/// continuous across vertices.
template <typename F>
GridFunction sample(const Grid& grid, F&& field) {
    GridFunction f(grid);
    for (int e = 0; e < grid.graph().edge_count(); ++e)
        for (int i = 0; i < grid.nodes_on_edge(e); ++i)
            f.values[grid.edge_node(e, i)] = field(e, grid.node_coord(e, i));
    return f;
}

double integrate(const GridFunction& f);

} // namespace mgc
