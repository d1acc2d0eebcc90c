#include "mgc/graph_io.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace mgc {

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '#') {
                while (pos < text.size() && text[pos] != '\n')
                    ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            throw ParseError(std::string("expected '") + c + "' at offset " +
                             std::to_string(pos));
        ++pos;
    }

    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::string identifier() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')
                ++pos;
            else
                break;
        }
        if (pos == start)
            throw ParseError("expected identifier at offset " + std::to_string(start));
        return text.substr(start, pos - start);
    }

    double number() {
        skip_ws();
        const char* begin = text.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin)
            throw ParseError("expected number at offset " + std::to_string(pos));
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }
};

GraphDescription::EdgeRecord parse_edge_record(Cursor& cur) {
    GraphDescription::EdgeRecord rec;
    bool have_tail = false, have_head = false, have_length = false;
    cur.expect('{');
    while (!cur.accept('}')) {
        std::string key = cur.identifier();
        cur.expect(':');
        if (key == "tail") {
            rec.tail = cur.identifier();
            have_tail = true;
        } else if (key == "head") {
            rec.head = cur.identifier();
            have_head = true;
        } else if (key == "length") {
            rec.length = cur.number();
            have_length = true;
        } else {
            throw ParseError("unknown edge field '" + key + "'");
        }
        if (!cur.accept(',') && cur.peek() != '}')
            throw ParseError("expected ',' or '}' in edge record");
    }
    if (!have_tail || !have_head || !have_length)
        throw ParseError("edge record needs tail, head and length");
    return rec;
}

} // namespace

GraphDescription parse_graph_description(const std::string& text) {
    GraphDescription desc;
    bool have_vertices = false, have_edges = false;
    Cursor cur{text};
    while (!cur.eof()) {
        std::string key = cur.identifier();
        cur.expect(':');
        if (key == "vertices") {
            if (have_vertices)
                throw ParseError("duplicate field 'vertices'");
            have_vertices = true;
            cur.expect('[');
            if (!cur.accept(']')) {
                do {
                    std::string id = cur.identifier();
                    for (const std::string& seen : desc.vertices)
                        if (seen == id)
                            throw ParseError("duplicate vertex id '" + id + "'");
                    desc.vertices.push_back(id);
                } while (cur.accept(','));
                cur.expect(']');
            }
        } else if (key == "edges") {
            if (have_edges)
                throw ParseError("duplicate field 'edges'");
            have_edges = true;
            cur.expect('[');
            if (!cur.accept(']')) {
                do {
                    desc.edges.push_back(parse_edge_record(cur));
                } while (cur.accept(','));
                cur.expect(']');
            }
        } else {
            throw ParseError("unknown field '" + key + "'");
        }
    }
    if (!have_vertices)
        throw ParseError("missing field 'vertices'");
    if (!have_edges)
        throw ParseError("missing field 'edges'");
    return desc;
}

GraphDescription load_graph_description(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open graph file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_graph_description(ss.str());
}

MetricGraph build_graph(const GraphDescription& desc) {
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < desc.vertices.size(); ++i) {
        if (!index.emplace(desc.vertices[i], static_cast<int>(i)).second)
            throw ParseError("duplicate vertex id '" + desc.vertices[i] + "'");
    }
    std::vector<Edge> edges;
    edges.reserve(desc.edges.size());
    for (const auto& rec : desc.edges) {
        auto t = index.find(rec.tail);
        auto h = index.find(rec.head);
        if (t == index.end())
            throw DanglingVertexReference("edge references unknown vertex '" + rec.tail + "'");
        if (h == index.end())
            throw DanglingVertexReference("edge references unknown vertex '" + rec.head + "'");
        edges.push_back({t->second, h->second, rec.length});
    }
    return MetricGraph::build(static_cast<int>(desc.vertices.size()), std::move(edges));
}

} // namespace mgc
