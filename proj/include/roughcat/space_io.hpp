#pragma once

// Space files (JSON, CSV matrix) and inline constructor specs.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "spaces.hpp"

namespace roughcat {

using nlohmann::json;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::invalid_input, "cannot open space file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline double json_length(const json& v, const std::string& field) {
    if (!v.is_number()) fail(ErrorKind::invalid_input, field + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ErrorKind::invalid_input, field + ": not finite");
    return d;
}

inline std::size_t json_index(const json& v, const std::string& field, std::size_t n,
                              const std::unordered_map<std::string, std::size_t>& ids) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
        const auto i = v.get<std::size_t>();
        if (i >= n) fail(ErrorKind::invalid_input, field + ": node index " + std::to_string(i) + " out of range");
        return i;
    }
    if (v.is_string()) {
        auto it = ids.find(v.get<std::string>());
        if (it == ids.end()) fail(ErrorKind::invalid_input, field + ": unknown node id '" + v.get<std::string>() + "'");
        return it->second;
    }
    fail(ErrorKind::invalid_input, field + ": expected a node index or id");
}

}  // namespace detail

inline std::shared_ptr<Space> space_from_json(const json& j, const std::string& origin) {
    if (!j.is_object()) fail(ErrorKind::invalid_input, "space: expected a JSON object");
    if (!j.contains("kind") || !j["kind"].is_string()) fail(ErrorKind::invalid_input, "kind: missing or not a string");
    const std::string kind = j["kind"].get<std::string>();
    std::vector<std::string> labels;
    if (j.contains("labels")) {
        if (!j["labels"].is_array()) fail(ErrorKind::invalid_input, "labels: expected an array");
        for (std::size_t i = 0; i < j["labels"].size(); ++i) {
            if (!j["labels"][i].is_string())
                fail(ErrorKind::invalid_input, "labels[" + std::to_string(i) + "]: expected a string");
            labels.push_back(j["labels"][i].get<std::string>());
        }
    }
    if (kind == "finite") {
        if (!j.contains("matrix") || !j["matrix"].is_array()) fail(ErrorKind::invalid_input, "matrix: missing or not an array");
        const auto& M = j["matrix"];
        const std::size_t n = M.size();
        std::vector<std::vector<double>> m(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::string f = "matrix[" + std::to_string(i) + "]";
            if (!M[i].is_array() || M[i].size() != n)
                fail(ErrorKind::invalid_input, f + ": expected a row of " + std::to_string(n) + " numbers");
            for (std::size_t k = 0; k < n; ++k) m[i].push_back(detail::json_length(M[i][k], f + "[" + std::to_string(k) + "]"));
        }
        if (!labels.empty() && labels.size() != n)
            fail(ErrorKind::invalid_input, "labels: expected " + std::to_string(n) + " entries");
        FiniteMetric fm = validate_metric(m, labels);
        return Space::from_finite(std::move(fm), "file(" + origin + ")");
    }
    if (kind == "graph") {
        if (!j.contains("nodes") || !j["nodes"].is_array()) fail(ErrorKind::invalid_input, "nodes: missing or not an array");
        if (!j.contains("edges") || !j["edges"].is_array()) fail(ErrorKind::invalid_input, "edges: missing or not an array");
        GraphSpace g;
        g.n = j["nodes"].size();
        std::unordered_map<std::string, std::size_t> ids;
        bool coords = true;
        std::vector<Coord> cs;
        for (std::size_t i = 0; i < g.n; ++i) {
            const auto& node = j["nodes"][i];
            const std::string f = "nodes[" + std::to_string(i) + "]";
            if (!node.is_object()) fail(ErrorKind::invalid_input, f + ": expected an object");
            if (node.contains("id")) {
                const std::string id = node["id"].is_string() ? node["id"].get<std::string>() : node["id"].dump();
                if (!ids.emplace(id, i).second) fail(ErrorKind::invalid_input, f + ".id: duplicate id '" + id + "'");
                g.ids.push_back(id);
            } else {
                g.ids.push_back(std::to_string(i));
            }
            if (node.contains("coords")) {
                const auto& c = node["coords"];
                if (!c.is_array() || c.size() != 2) fail(ErrorKind::invalid_input, f + ".coords: expected [x, y]");
                cs.push_back({detail::json_length(c[0], f + ".coords[0]"), detail::json_length(c[1], f + ".coords[1]")});
            } else {
                coords = false;
            }
        }
        if (coords && g.n > 0) g.coords = cs;
        for (std::size_t e = 0; e < j["edges"].size(); ++e) {
            const auto& E = j["edges"][e];
            const std::string f = "edges[" + std::to_string(e) + "]";
            if (!E.is_array() || E.size() != 3) fail(ErrorKind::invalid_input, f + ": expected [i, j, w]");
            const std::size_t u = detail::json_index(E[0], f + "[0]", g.n, ids);
            const std::size_t v = detail::json_index(E[1], f + "[1]", g.n, ids);
            const double w = detail::json_length(E[2], f + "[2]");
            if (!(w > 0.0)) fail(ErrorKind::invalid_input, f + "[2]: edge weight must be > 0");
            if (u == v) fail(ErrorKind::invalid_input, f + ": self-loop");
            g.edges.push_back({u, v, w});
        }
        try {
            g.finalize();
        } catch (const Error& err) {
            fail(ErrorKind::invalid_input, std::string("edges: ") + err.what());
        }
        auto sp = Space::from_graph(std::move(g), "file(" + origin + ")");
        return sp;
    }
    fail(ErrorKind::invalid_input, "kind: expected \"finite\" or \"graph\", got \"" + kind + "\"");
}

inline std::shared_ptr<Space> space_from_csv(const std::string& text, const std::string& origin) {
    std::vector<std::vector<double>> m;
    std::vector<std::string> labels;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        std::vector<double> row;
        bool numeric = true;
        for (const auto& c : cells) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(c, &pos));
                if (c.find_first_not_of(" \t", pos) != std::string::npos) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (m.empty() && labels.empty()) {
                labels = cells;
                continue;
            }
            fail(ErrorKind::invalid_input, "csv line " + std::to_string(lineno) + ": non-numeric cell");
        }
        m.push_back(row);
    }
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i].size() != m.size())
            fail(ErrorKind::invalid_input, "csv row " + std::to_string(i) + ": expected " + std::to_string(m.size()) + " cells");
    if (!labels.empty() && labels.size() != m.size()) fail(ErrorKind::invalid_input, "csv header: label count mismatch");
    return Space::from_finite(validate_metric(m, labels), "file(" + origin + ")");
}

namespace detail {

struct SpecArgs {
    std::string kind;
    std::unordered_map<std::string, std::string> kv;

    double num(const std::string& key, double def) const {
        auto it = kv.find(key);
        if (it == kv.end()) return def;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(key);
            return v;
        } catch (const std::exception&) {
            fail(ErrorKind::invalid_input, kind + " spec field '" + key + "': not a number");
        }
    }
    std::string str(const std::string& key, const std::string& def) const {
        auto it = kv.find(key);
        return it == kv.end() ? def : it->second;
    }
};

inline SpecArgs parse_spec(const std::string& spec) {
    SpecArgs a;
    const auto colon = spec.find(':');
    a.kind = spec.substr(0, colon);
    if (colon == std::string::npos) return a;
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) fail(ErrorKind::invalid_input, a.kind + " spec item '" + item + "' lacks '='");
        a.kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return a;
}

}  // namespace detail

// Inline constructor specs:
//   grid:norm=l2,halfwidth=8,step=0.125     circle:n=12,circumference=12
//   star:leaves=4,len=1   path:nodes=5,len=1   random:nodes=40,seed=1
//   hyperbolic:kappa=-1,radius=5,count=60,seed=0
//   ladder:n_max=4,depth=8,step=0.5         (materialized; keep it small)
//   product:<spec>&<spec>
inline std::shared_ptr<Space> space_from_spec(const std::string& spec) {
    if (spec.rfind("product:", 0) == 0) {
        const std::string rest = spec.substr(8);
        const auto amp = rest.find('&');
        if (amp == std::string::npos) fail(ErrorKind::invalid_input, "product spec needs two factors joined by '&'");
        const auto a = space_from_spec(rest.substr(0, amp));
        const auto b = space_from_spec(rest.substr(amp + 1));
        return l2_product(*a, *b);
    }
    const auto s = detail::parse_spec(spec);
    if (s.kind == "grid") {
        const std::string norm = s.str("norm", "l2");
        if (norm != "l1" && norm != "l2") fail(ErrorKind::invalid_input, "grid spec field 'norm': expected l1 or l2");
        return make_grid_plane(s.num("halfwidth", 4), s.num("step", 1), norm == "l1" ? GridNorm::l1 : GridNorm::l2);
    }
    if (s.kind == "circle")
        return make_circle(static_cast<std::size_t>(s.num("n", 12)), s.num("circumference", s.num("n", 12)));
    if (s.kind == "star" || s.kind == "path" || s.kind == "random") return make_tree(spec);
    if (s.kind == "hyperbolic")
        return make_hyperbolic_sample(s.num("kappa", -1), s.num("radius", 3), static_cast<std::size_t>(s.num("count", 40)),
                                      static_cast<std::uint64_t>(s.num("seed", 0)));
    if (s.kind == "ladder") {
        const auto L = make_warped_ladder(static_cast<int>(s.num("n_max", 2)), s.num("depth", 4), s.num("step", 0.5));
        auto fm = L.space->materialize();
        auto sp = Space::from_finite(std::move(fm), L.space->provenance());
        sp->set_budget(L.space->max_edge_weight(), L.space->distortion());
        return sp;
    }
    fail(ErrorKind::invalid_input, "unknown space spec kind '" + s.kind + "'");
}

// A path to an existing .json/.csv file, or an inline spec.
inline std::shared_ptr<Space> load_space(const std::string& source) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::is_regular_file(source, ec)) {
        const std::string text = detail::read_file(source);
        const std::string ext = fs::path(source).extension().string();
        if (ext == ".csv") return space_from_csv(text, source);
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            fail(ErrorKind::invalid_input, "space file '" + source + "': malformed JSON (" + e.what() + ")");
        }
        return space_from_json(j, source);
    }
    if (source.find(':') == std::string::npos && source.find('.') != std::string::npos)
        fail(ErrorKind::invalid_input, "space file '" + source + "' does not exist");
    return space_from_spec(source);
}

inline json space_to_json(const Space& X, std::size_t cap = 4000) {
    json j;
    if (X.has_graph()) {
        const GraphSpace& g = X.graph();
        j["kind"] = "graph";
        json nodes = json::array();
        for (std::size_t i = 0; i < g.n; ++i) {
            json node{{"id", X.label(i)}};
            if (g.has_coords()) node["coords"] = {g.coords[i].x, g.coords[i].y};
            nodes.push_back(node);
        }
        json edges = json::array();
        for (const auto& e : g.edges) edges.push_back({e.u, e.v, e.w});
        j["nodes"] = nodes;
        j["edges"] = edges;
    } else {
        const FiniteMetric m = X.materialize(cap);
        j["kind"] = "finite";
        json labels = json::array();
        for (std::size_t i = 0; i < m.n; ++i) labels.push_back(X.label(i));
        j["labels"] = labels;
        json rows = json::array();
        for (std::size_t i = 0; i < m.n; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < m.n; ++k) row.push_back(m.at(i, k));
            rows.push_back(row);
        }
        j["matrix"] = rows;
    }
    j["provenance"] = X.provenance();
    return j;
}

}  // namespace roughcat
