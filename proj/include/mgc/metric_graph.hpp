#pragma once

#include "mgc/errors.hpp"

#include <optional>
#include <vector>

namespace mgc {

/// Combinatorial edge with a positive length. Edges are identified with the
/// symmetric interval [-length/2, +length/2]; the tail sits at -length/2 and
/// the head at +length/2, so the outer normal is -1 at the tail and +1 at the
/// head. Multi-edges and self-loops are allowed.
struct Edge {
    int tail = -1;
    int head = -1;
    double length = 0.0;
};

/// A location on the graph: an edge id plus a coordinate s in
/// [-length/2, +length/2]. Points at edge endpoints that belong to the same
/// vertex compare equal under the vertex identification.
struct GraphPoint {
    int edge = 0;
    double s = 0.0;
};

/// One incidence of an edge at a vertex. A self-loop produces two incidences.
struct Incidence {
    int edge;
    bool at_head; // false: this vertex is the tail end
};

class MetricGraph {
public:
    /// Validates and builds the graph. Throws NonpositiveLength,
    /// DanglingVertexReference or DisconnectedGraph.
    static MetricGraph build(int vertex_count, std::vector<Edge> edges);

    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(int e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Incidence>& incident(int v) const { return incident_[v]; }
    int degree(int v) const { return static_cast<int>(incident_[v].size()); }
    int deg_max() const { return deg_max_; }
    double total_length() const { return total_length_; }
    double min_edge_length() const { return min_length_; }

    /// Endpoint vertex of an edge end (at_head ? head : tail).
    int end_vertex(int e, bool at_head) const {
        return at_head ? edges_[e].head : edges_[e].tail;
    }

    /// If p coincides with an edge endpoint (within tolerance), the vertex it
    /// is identified with; otherwise nullopt.
    std::optional<int> vertex_of(const GraphPoint& p) const;

    /// Representative point of a vertex on its lowest-id incident edge.
    GraphPoint vertex_point(int v) const;

    /// Point equality in the quotient space (vertex identification).
    bool same_point(const GraphPoint& x, const GraphPoint& y) const;

    /// Shortest-path distance between vertices.
    double vertex_distance(int u, int v) const { return vdist_[u][v]; }

    /// Shortest-path distance between arbitrary points.
    double distance(const GraphPoint& x, const GraphPoint& y) const;

    /// Point at parameter s in [0,1] along one fixed shortest path from x to
    /// y. Ties between equal-length paths are broken by the lexicographically
    /// smallest edge-id sequence.
    GraphPoint geodesic_point(const GraphPoint& x, const GraphPoint& y, double s) const;

    void check_point(const GraphPoint& p) const;

private:
    struct PathSegment {
        int edge;
        double from; // edge coordinate
        double to;
    };

    // Candidate shortest path with deterministic tie-breaking data.
    struct PathCandidate {
        double length = 0.0;
        std::vector<PathSegment> segments;
        std::vector<int> edge_seq;
        bool valid = false;
    };

    PathCandidate shortest_path(const GraphPoint& x, const GraphPoint& y) const;
    std::vector<int> lex_vertex_path(int a, int b) const; // edge ids of the walk a -> b

    int vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> incident_;
    int deg_max_ = 0;
    double total_length_ = 0.0;
    double min_length_ = 0.0;
    std::vector<std::vector<double>> vdist_;
};

/// Extension G^{2eps}: one pendant edge of length 2*eps attached at every
/// original vertex, ending in a new degree-one vertex. Original edge and
/// vertex ids are preserved, so points of G embed with unchanged coordinates.
struct GraphExtension {
    MetricGraph graph;
    double eps = 0.0;
    int original_vertices = 0;
    int original_edges = 0;
    std::vector<int> pendant_edge;   // per original vertex
    std::vector<int> pendant_vertex; // new degree-one vertex per original vertex
};

GraphExtension extend_graph(const MetricGraph& g, double eps);

} // namespace mgc
