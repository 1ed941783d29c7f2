#pragma once

// Report entries, the output envelope, canonical JSON and text tables.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conditions.hpp"
#include "lemma_oracles.hpp"
#include "spaces.hpp"

namespace roughcat {

using nlohmann::json;

inline constexpr const char* kToolName = "roughcat";
inline constexpr const char* kToolVersion = "0.1.0";

// 12 significant digits; non-finite values become strings.
inline json canonical_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    double r = std::strtod(buf, nullptr);
    if (r == 0.0) r = 0.0; // drop the sign of zero
    return r;
}

inline void canonicalize(json& j) {
    if (j.is_number_float()) {
        j = canonical_number(j.get<double>());
    } else if (j.is_array() || j.is_object()) {
        for (auto& v : j) canonicalize(v);
    }
}

// Sorted keys (std::map backing), two-space indent, trailing newline.
inline std::string dump_canonical(json j) {
    canonicalize(j);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- entries

template <std::size_t N>
json witness_json(const Space& X, const std::array<std::size_t, N>& idx) {
    json w;
    w["indices"] = json::array();
    w["labels"] = json::array();
    for (auto i : idx) {
        w["indices"].push_back(i);
        w["labels"].push_back(X.label(i));
    }
    return w;
}

inline json curvature_entry(const Space& X, const std::string& condition, const std::string& kappa, double constant,
                            json witness, std::size_t samples, double budget) {
    return {{"type", "curvature"},
            {"space", X.provenance()},
            {"condition", condition},
            {"kappa", kappa},
            {"constant", constant},
            {"label", kEstimateLabel},
            {"witness", std::move(witness)},
            {"samples", samples},
            {"budget", budget}};
}

inline json delta_entry(const Space& X, const DeltaResult& r) {
    json w = witness_json(X, r.witness);
    w["pairing_sums"] = r.sums;
    json e = curvature_entry(X, "delta-hyperbolicity", "n/a", r.delta, w, r.tuples, X.budget());
    e["label"] = "exact (all 4-subsets)";
    return e;
}

inline json four_point_entry(const Space& X, const Curvature& k, OrderingPolicy p, const FourPointScan& s) {
    json w = witness_json(X, s.witness);
    w["optimal_diagonal"] = s.best.optimal_diagonal;
    w["far_distance"] = s.best.far_distance;
    w["embedded_exact"] = s.best.embedded_exact;
    json e = curvature_entry(X, "rough-4-point", k.str(), s.C4, w, s.tuples, X.budget());
    e["orderings"] = ordering_name(p);
    e["evaluations"] = s.evaluations;
    return e;
}

inline json rcat_witness_json(const Space& X, const RcatWitness& w) {
    json j = witness_json(X, w.vertices);
    j["u"] = {{"node", w.u_node}, {"side", w.side_u}, {"index", w.u_index}, {"label", X.label(w.u_node)}};
    j["v"] = {{"node", w.v_node}, {"side", w.side_v}, {"index", w.v_index}, {"label", X.label(w.v_node)}};
    j["vertex"] = w.vertex;
    j["triangle"] = w.triangle;
    j["d_uv"] = w.d_uv;
    j["comparison"] = w.comparison;
    return j;
}

inline json rcat_entry(const Space& X, const Curvature& k, const RcatScan& s) {
    json e = curvature_entry(X, "rough-cat", k.str(), s.C, rcat_witness_json(X, s.witness), s.pairs,
                             s.budget);
    e["raw_excess"] = s.raw;
    e["triangles"] = s.triangles;
    return e;
}

inline json weak_entry(const Space& X, const Curvature& k, const std::string& condition, const WeakScan& s) {
    json e = curvature_entry(X, condition, k.str(), s.C, rcat_witness_json(X, s.witness), s.samples,
                             X.budget() + s.snap);
    e["raw_excess"] = s.raw;
    e["triangles"] = s.triangles;
    e["excluded"] = s.excluded;
    return e;
}

inline json bolicity_entry(const Space& X, MidpointPolicy p, const BolicityScan& s) {
    json e = curvature_entry(X, "bolicity", "0", s.delta, rcat_witness_json(X, s.witness), s.samples,
                             X.budget() + s.snap);
    e["midpoints"] = midpoint_policy_name(p);
    e["raw_defect"] = s.raw;
    e["excluded"] = s.excluded;
    return e;
}

inline json cn_entry(const Space& X, const CnScan& s) {
    json w = witness_json(X, s.witness);
    w["midpoint"] = s.midpoint;
    json e = curvature_entry(X, "cn-inequality", "0", s.deficit, w, s.samples, X.budget() + s.snap);
    e["raw_deficit"] = s.raw;
    e["excluded"] = s.excluded;
    return e;
}

inline json bound_entry(const BoundCheck& b) {
    json in = json::object();
    for (const auto& [k, v] : b.inputs) in[k] = v;
    return {{"type", "bound"},     {"statement", b.statement}, {"inputs", in},
            {"lhs", b.lhs},        {"rhs", b.rhs},             {"slack", b.slack},
            {"tolerance", b.tolerance}, {"pass", b.pass}};
}

inline json conversion_entry(const std::string& from, double C, const std::string& kappa, const Conversion& c) {
    return {{"type", "conversion"}, {"from", from},   {"input", C},          {"kappa", kappa},
            {"target", c.target},   {"formula", c.formula}, {"value", c.value}};
}

inline json space_entry(const Space& X) {
    json e{{"type", "space"},
           {"space", X.provenance()},
           {"points", X.size()},
           {"representation", X.has_graph() ? "graph" : X.is_finite() ? "finite" : "oracle"},
           {"max_edge_weight", X.max_edge_weight()},
           {"distortion", X.distortion()},
           {"budget", X.budget()}};
    if (X.has_graph()) e["edges"] = X.graph().edges.size();
    return e;
}

// ---------------------------------------------------------------- envelope

struct Envelope {
    std::string command;
    json config = json::object();
    json results = json::array();
    json timings; // null unless requested

    json to_json() const {
        json j{{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"config", config},
               {"results", results}};
        if (!timings.is_null()) j["timings"] = timings;
        return j;
    }
};

// ---------------------------------------------------------------- tables

namespace detail {

inline std::string cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    if (v.is_number_float()) {
        const json c = canonical_number(v.get<double>());
        if (c.is_string()) return c.get<std::string>();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", c.get<double>());
        return buf;
    }
    if (v.is_number()) return v.dump();
    if (v.is_object() && v.contains("indices")) {
        std::string s;
        for (const auto& i : v["indices"]) s += (s.empty() ? "" : " ") + i.dump();
        s = "[" + s + "]";
        if (v.contains("u") && v.contains("v"))
            s += " u=" + v["u"]["node"].dump() + " v=" + v["v"]["node"].dump();
        return s;
    }
    if (v.is_object()) {
        std::string s;
        for (const auto& [k, x] : v.items()) s += (s.empty() ? "" : " ") + k + "=" + cell(x);
        return s;
    }
    return v.dump();
}

inline std::string render(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> w(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        w[c] = head[c].size();
        for (const auto& r : rows) w[c] = std::max(w[c], r[c].size());
    }
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c + 1 < r.size()) os << std::left << std::setw(static_cast<int>(w[c])) << r[c] << "  ";
            else os << r[c];
        }
        os << "\n";
    };
    line(head);
    std::vector<std::string> rule;
    for (auto x : w) rule.emplace_back(x, '-');
    line(rule);
    for (const auto& r : rows) line(r);
    return os.str();
}

}  // namespace detail

inline std::string emit_table(const json& envelope) {
    std::ostringstream os;
    os << envelope.value("tool", "") << " " << envelope.value("version", "") << "  " << envelope.value("command", "")
       << "\n";
    const json& results = envelope["results"];
    if (results.empty()) {
        os << "(no results)\n";
        return os.str();
    }
    struct Layout {
        const char* type;
        std::vector<std::string> cols;
    };
    const std::vector<Layout> layouts{
        {"space", {"space", "points", "representation", "max_edge_weight", "distortion", "budget"}},
        {"curvature", {"condition", "kappa", "constant", "witness", "samples", "budget", "space"}},
        {"bound", {"statement", "lhs", "rhs", "slack", "tolerance", "pass"}},
        {"conversion", {"from", "input", "target", "formula", "value"}},
    };
    for (const auto& lay : layouts) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : results) {
            if (r.value("type", "") != lay.type) continue;
            std::vector<std::string> row;
            for (const auto& c : lay.cols) row.push_back(r.contains(c) ? detail::cell(r[c]) : "");
            rows.push_back(std::move(row));
        }
        if (!rows.empty()) os << "\n" << detail::render(lay.cols, rows);
    }
    return os.str();
}

}  // namespace roughcat
