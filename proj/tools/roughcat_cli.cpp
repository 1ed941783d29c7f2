// roughcat: curvature-condition scans, lemma checks and constant conversions.
//
// Exit codes: 0 success, 2 invalid input (message names the field), 1 internal.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "roughcat/roughcat.hpp"

using namespace roughcat;

namespace {

struct Options {
    std::string space;
    std::string kappa = "0";
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string output;
    bool timings = false;

    std::size_t tuples = 500;
    bool exhaustive = false;
    std::size_t window = 0;
    std::string orderings = "given";
    std::size_t triangles = 200;
    std::size_t pairs = 50;
    std::size_t samples = 2000;
    std::string variant = "weak";
    std::string midpoints = "all";
    double tolerance = 1e-6;
    double h = 0.5;
    std::string from;
    double constant = 0.0;
    std::string save;
};

// Validation failures surface as exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_kappa(const std::string& s) {
    if (s == "-inf") return -kInf;
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size() && std::isfinite(v) && v <= 0.0) return v == 0.0 ? 0.0 : v;
    } catch (const std::exception&) {
    }
    throw UsageError("--kappa: expected 0, a negative decimal or -inf, got '" + s + "'");
}

// Number of 4-subsets; small spaces are scanned exhaustively.
double subset_count(std::size_t n) {
    return n < 4 ? 0.0 : double(n) * double(n - 1) * double(n - 2) * double(n - 3) / 24.0;
}

json base_config(const Options& o, const std::string& cmd) {
    json c{{"seed", o.seed}};
    if (cmd != "convert" && cmd != "lemmas") c["space"] = o.space;
    if (cmd == "lemmas" && !o.space.empty()) c["space"] = o.space;
    return c;
}

std::shared_ptr<Space> need_space(const Options& o) {
    if (o.space.empty()) throw UsageError("--space: required for this command");
    return load_space(o.space);
}

Envelope run_command(const std::string& cmd, const Options& o) {
    Envelope env;
    env.command = cmd;
    env.config = base_config(o, cmd);

    if (cmd == "build") {
        const auto X = need_space(o);
        env.results.push_back(space_entry(*X));
        if (!o.save.empty()) {
            std::ofstream f(o.save, std::ios::binary);
            if (!f) throw UsageError("--save: cannot write '" + o.save + "'");
            f << dump_canonical(space_to_json(*X));
            env.config["save"] = o.save;
        }
    } else if (cmd == "hyperbolicity") {
        const auto X = need_space(o);
        const bool exhaustive = o.exhaustive || subset_count(X->size()) <= double(o.tuples);
        env.config["tuples"] = exhaustive ? json("exhaustive") : json(o.tuples);
        if (exhaustive) {
            env.results.push_back(delta_entry(*X, delta_hyperbolicity(*X)));
        } else {
            json e = delta_entry(*X, delta_hyperbolicity_sampled(*X, o.tuples, o.seed));
            e["label"] = kEstimateLabel;
            env.results.push_back(e);
        }
    } else if (cmd == "four-point") {
        const auto X = need_space(o);
        const double kap = parse_kappa(o.kappa);
        if (o.orderings != "given" && o.orderings != "all")
            throw UsageError("--orderings: expected given or all, got '" + o.orderings + "'");
        const auto policy = o.orderings == "all" ? OrderingPolicy::all : OrderingPolicy::given;
        std::vector<Quad> tuples;
        if (o.exhaustive || (o.window == 0 && subset_count(X->size()) <= double(o.tuples))) {
            tuples = exhaustive_tuples(X->size());
            env.config["tuples"] = "exhaustive";
        } else if (o.window > 0) {
            tuples = grid_window_tuples(*X, o.tuples, o.window, o.seed);
            env.config["tuples"] = o.tuples;
            env.config["window"] = o.window;
        } else {
            tuples = seeded_tuples(X->size(), o.tuples, o.seed);
            env.config["tuples"] = o.tuples;
        }
        env.config["kappa"] = o.kappa;
        env.config["orderings"] = o.orderings;
        const Curvature k = Curvature::from_kappa(kap);
        env.results.push_back(four_point_entry(*X, k, policy, four_point_scan(*X, k, policy, tuples)));
    } else if (cmd == "rcat") {
        const auto X = need_space(o);
        const Curvature k = Curvature::from_kappa(parse_kappa(o.kappa));
        env.config["kappa"] = o.kappa;
        env.config["triangles"] = o.triangles;
        env.config["pairs"] = o.pairs;
        env.results.push_back(rcat_entry(*X, k, rcat_scan(*X, k, o.triangles, o.pairs, o.seed)));
    } else if (cmd == "weak-rcat") {
        const auto X = need_space(o);
        const Curvature k = Curvature::from_kappa(parse_kappa(o.kappa));
        if (o.variant != "weak" && o.variant != "very-weak")
            throw UsageError("--variant: expected weak or very-weak, got '" + o.variant + "'");
        env.config["kappa"] = o.kappa;
        env.config["triangles"] = o.triangles;
        env.config["variant"] = o.variant;
        if (o.variant == "weak")
            env.results.push_back(weak_entry(*X, k, "weak-rough-cat", weak_rcat_min_C(*X, k, o.triangles, o.seed)));
        else
            env.results.push_back(
                weak_entry(*X, k, "very-weak-rough-cat", very_weak_rcat_min_C(*X, k, o.triangles, o.seed)));
    } else if (cmd == "bolicity") {
        const auto X = need_space(o);
        if (o.midpoints != "all" && o.midpoints != "best")
            throw UsageError("--midpoints: expected all or best, got '" + o.midpoints + "'");
        const auto p = o.midpoints == "all" ? MidpointPolicy::all : MidpointPolicy::best;
        env.config["triangles"] = o.triangles;
        env.config["midpoints"] = o.midpoints;
        env.results.push_back(bolicity_entry(*X, p, bolicity_min_delta(*X, p, o.triangles, o.seed)));
    } else if (cmd == "cn") {
        const auto X = need_space(o);
        env.config["samples"] = o.samples;
        env.results.push_back(cn_entry(*X, cn_min_deficit(*X, o.samples, o.seed)));
    } else if (cmd == "lemmas") {
        if (!(o.tolerance >= 0.0)) throw UsageError("--tolerance: must be >= 0");
        env.config["samples"] = o.samples;
        env.config["tolerance"] = o.tolerance;
        for (const auto& c : model_lemma_suite(o.samples, o.seed, o.tolerance)) env.results.push_back(bound_entry(c));
        if (!o.space.empty()) {
            const auto X = load_space(o.space);
            if (!(o.h >= 0.0 && o.h <= 1.0)) throw UsageError("--short-h: must lie in [0, 1]");
            env.config["h"] = o.h;
            const DeltaResult d =
                X->size() <= 60 ? delta_hyperbolicity(*X) : delta_hyperbolicity_sampled(*X, 20000, o.seed);
            env.results.push_back(delta_entry(*X, d));
            env.results.push_back(
                bound_entry(tripod_gap_check(*X, d.delta, o.h, std::max<std::size_t>(1, o.samples / 10), o.seed,
                                             o.tolerance)));
        }
    } else if (cmd == "convert") {
        if (o.from.empty()) throw UsageError("--from: required");
        if (!(o.constant >= 0.0)) throw UsageError("--C: must be >= 0");
        const double kap = parse_kappa(o.kappa);
        env.config["from"] = o.from;
        env.config["C"] = o.constant;
        env.config["kappa"] = o.kappa;
        env.config.erase("seed");
        for (const auto& c : constant_conversions(o.from, o.constant, kap))
            env.results.push_back(conversion_entry(o.from, o.constant, o.kappa, c));
    }
    return env;
}

void write_output(const Options& o, const std::string& bytes) {
    if (o.output.empty() || o.output == "-") {
        std::cout << bytes;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw UsageError("--output: cannot write '" + o.output + "'");
    f << bytes;
    if (!f) throw UsageError("--output: write to '" + o.output + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"roughcat: numerical curvature-condition checks on finite and graph metric spaces"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* s, bool space_required, bool kappa) {
        auto* sp = s->add_option("--space", o.space, "space file (.json/.csv) or inline spec, e.g. grid:norm=l2,halfwidth=8,step=0.125");
        if (space_required) sp->required();
        if (kappa) s->add_option("--kappa", o.kappa, "model curvature: 0, a negative decimal, or -inf");
        s->add_option("--seed", o.seed, "64-bit seed (default 0)");
        s->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
        s->add_option("--output,-o", o.output, "output path (default stdout)");
        s->add_flag("--timings", o.timings, "include wall-clock timings (output no longer byte-stable)");
    };

    auto* build = app.add_subcommand("build", "construct or import a space and summarize it");
    common(build, true, false);
    build->add_option("--save", o.save, "also write the space as JSON");

    auto* hyp = app.add_subcommand("hyperbolicity", "four-point delta over all or sampled 4-subsets");
    common(hyp, true, false);
    hyp->add_option("--tuples", o.tuples, "sampled 4-subsets");
    hyp->add_flag("--exhaustive", o.exhaustive, "all 4-subsets");

    auto* four = app.add_subcommand("four-point", "rough 4-point subembedding constant");
    common(four, true, true);
    four->add_option("--orderings", o.orderings, "given or all");
    four->add_option("--tuples", o.tuples, "seeded ordered tuples");
    four->add_flag("--exhaustive", o.exhaustive, "all 4-subsets");
    four->add_option("--window", o.window, "draw tuples inside window x window blocks of a square grid");

    auto* rc = app.add_subcommand("rcat", "rough CAT(kappa) excess scan");
    common(rc, true, true);
    rc->add_option("--triangles", o.triangles, "sampled triangles");
    rc->add_option("--pairs", o.pairs, "cross-side pairs per triangle");

    auto* wr = app.add_subcommand("weak-rcat", "weak or very weak rough CAT(kappa) scan");
    common(wr, true, true);
    wr->add_option("--triangles", o.triangles, "sampled triangles");
    wr->add_option("--variant", o.variant, "weak or very-weak");

    auto* bo = app.add_subcommand("bolicity", "bolicity defect over sampled triples");
    common(bo, true, false);
    bo->add_option("--triangles", o.triangles, "sampled triangles");
    bo->add_option("--midpoints", o.midpoints, "all or best");

    auto* cn = app.add_subcommand("cn", "CN inequality deficit with geodesic midpoints");
    common(cn, true, false);
    cn->add_option("--samples", o.samples, "sampled triples");

    auto* lem = app.add_subcommand("lemmas", "planar lemma checks; with --space also the tripod gap check");
    common(lem, false, false);
    lem->add_option("--samples", o.samples, "configurations per sweep")->default_val(10000);
    lem->add_option("--tolerance", o.tolerance, "pass when slack >= -tolerance");
    lem->add_option("--short-h", o.h, "shortness of the tripod paths");

    auto* conv = app.add_subcommand("convert", "constants implied by a named constant");
    conv->add_option("--from", o.from, "cat0, hrcat0, weak-hrcat0, very-weak-hrcat0, very-weak-rcat0, bolic, "
                                       "weak-rcat, four-point, hyperbolic, product-hrcat0")
        ->required();
    conv->add_option("--C", o.constant, "input constant (default 0)");
    conv->add_option("--kappa", o.kappa, "kappa for four-point conversions");
    conv->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
    conv->add_option("--output,-o", o.output, "output path (default stdout)");
    conv->add_flag("--timings", o.timings, "include wall-clock timings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        const auto t0 = std::chrono::steady_clock::now();
        Envelope env = run_command(cmd, o);
        if (o.timings) {
            const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            env.timings = {{"total_ms", ms}, {"threads", thread_count()}};
        }
        const json j = env.to_json();
        write_output(o, o.format == "table" ? emit_table(j) : dump_canonical(j));
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "roughcat: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "roughcat: " << e.what() << "\n";
        // only a broken internal invariant is exit 1; everything else traces to input
        return e.kind() == ErrorKind::inconsistency ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "roughcat: internal error: " << e.what() << "\n";
        return 1;
    }
}
