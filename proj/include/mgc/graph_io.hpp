#pragma once

#include "mgc/metric_graph.hpp"

#include <string>
#include <vector>

namespace mgc {

/// Parsed form of a graph-description file. The format is a small text
/// record with exactly two fields:
///
///   vertices: [a, b, hub]
///   edges: [{tail: a, head: hub, length: 1.0}, {tail: b, head: hub, length: 1.0}]
///
/// Comments start with '#'. Unknown fields are rejected.
struct GraphDescription {
    struct EdgeRecord {
        std::string tail;
        std::string head;
        double length = 0.0;
    };
    std::vector<std::string> vertices;
    std::vector<EdgeRecord> edges;
};

GraphDescription parse_graph_description(const std::string& text);
GraphDescription load_graph_description(const std::string& path);

/// Resolves names to indices and validates via MetricGraph::build.
MetricGraph build_graph(const GraphDescription& desc);

} // namespace mgc
