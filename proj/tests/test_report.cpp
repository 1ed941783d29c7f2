#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "roughcat/report.hpp"

using namespace roughcat;

TEST(CanonicalJson, Numbers) {
    EXPECT_EQ(canonical_number(0.1 + 0.2).get<double>(), 0.3);
    EXPECT_EQ(canonical_number(-0.0).dump(), "0.0");
    EXPECT_EQ(canonical_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(canonical_number(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(canonical_number(std::nan("")), "nan");
    EXPECT_EQ(canonical_number(1.0 / 3).get<double>(), 0.333333333333);
}

TEST(CanonicalJson, SortedKeysAndTrailingNewline) {
    json j{{"zeta", 1}, {"alpha", {{"b", 2.0000000000001}, {"a", -0.0}}}};
    const std::string s = dump_canonical(j);
    EXPECT_EQ(s, "{\n  \"alpha\": {\n    \"a\": 0.0,\n    \"b\": 2.0\n  },\n  \"zeta\": 1\n}\n");
    EXPECT_EQ(dump_canonical(json::parse(s)), s);
}

TEST(Envelope, EmptyAndTimings) {
    Envelope e;
    e.command = "lemmas";
    const json j = e.to_json();
    EXPECT_EQ(j["tool"], "roughcat");
    EXPECT_EQ(j["version"], kToolVersion);
    EXPECT_TRUE(j["results"].empty());
    EXPECT_FALSE(j.contains("timings"));
    EXPECT_NE(emit_table(j).find("(no results)"), std::string::npos);
    e.timings = {{"total_s", 1.5}};
    EXPECT_TRUE(e.to_json().contains("timings"));
}

TEST(Entries, ByteStableAcrossRuns) {
    auto build = [] {
        const auto T = make_random_tree(20, 3);
        Envelope e;
        e.command = "hyperbolicity";
        e.results.push_back(space_entry(*T));
        e.results.push_back(delta_entry(*T, delta_hyperbolicity(*T)));
        const auto k = Curvature::tripod();
        e.results.push_back(rcat_entry(*T, k, rcat_scan(*T, k, 10, 5, 1)));
        return dump_canonical(e.to_json());
    };
    EXPECT_EQ(build(), build());
}

TEST(Entries, WitnessCarriesIndicesAndLabels) {
    const auto sq = Space::from_finite(
        validate_metric({{0, 1, std::sqrt(2.0), 1}, {1, 0, 1, std::sqrt(2.0)}, {std::sqrt(2.0), 1, 0, 1}, {1, std::sqrt(2.0), 1, 0}},
                        {"a", "b", "c", "d"}),
        "square");
    const json e = delta_entry(*sq, delta_hyperbolicity(*sq));
    EXPECT_EQ(e["type"], "curvature");
    EXPECT_EQ(e["condition"], "delta-hyperbolicity");
    EXPECT_EQ(e["witness"]["indices"], json({0, 1, 2, 3}));
    EXPECT_EQ(e["witness"]["labels"], json({"a", "b", "c", "d"}));
    EXPECT_EQ(e["witness"]["pairing_sums"].size(), 3u);
    EXPECT_EQ(e["samples"], 1);

    Envelope env;
    env.command = "hyperbolicity";
    env.results.push_back(e);
    const std::string table = emit_table(env.to_json());
    EXPECT_NE(table.find("[0 1 2 3]"), std::string::npos);
    EXPECT_NE(table.find("0.414213562373"), std::string::npos);
}

TEST(Entries, BoundsAndConversions) {
    const json b = bound_entry(make_check("x <= y", {{"x", 1.0}}, 1.0, 2.0, 1e-9));
    EXPECT_EQ(b["pass"], true);
    EXPECT_EQ(b["inputs"]["x"], 1.0);
    const auto cs = constant_conversions("cat0");
    const json c = conversion_entry("cat0", 0, "0", cs[0]);
    EXPECT_EQ(c["target"], "rCAT(0)");
    Envelope env;
    env.command = "convert";
    env.results.push_back(c);
    env.results.push_back(b);
    const std::string t = emit_table(env.to_json());
    EXPECT_NE(t.find("2 + sqrt3"), std::string::npos);
    EXPECT_NE(t.find("yes"), std::string::npos);
}

TEST(Entries, NonFiniteValuesSerializeAsStrings) {
    CnScan s;  // no admissible samples
    s.deficit = kInf;
    const auto P = make_path_graph(3, 1);
    const std::string out = dump_canonical(cn_entry(*P, s));
    EXPECT_NE(out.find("\"constant\": \"inf\""), std::string::npos);
    EXPECT_NE(out.find("\"raw_deficit\": \"-inf\""), std::string::npos);
}
