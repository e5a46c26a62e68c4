#pragma once

// Experiment pipeline: domain -> reachable set -> abstraction -> PDB variants -> IDA*.
//
// Config files are flat "key = value" lines; '#' starts a comment. Keys:
//
//   name             label used in summaries (default: config file stem)
//   generator        "<family> <int>...", e.g. "toh-stack 9 4"
//   move_table       generator move list (scanalyzer "u:l[:a]", cstp "p:q")
//   implied_preconditions  true|false (toh-stack only)
//   domain, meta     PSVN file and layout metadata, instead of a generator
//   seed             goal | default | <sym> ...   (default: generator seed, else goal)
//   abstraction      one abstraction line; repeatable
//   abstraction_file file holding abstraction lines
//   variants         subset of ORGN MTX_EXH MTX_H2 TRUE PURE
//   eval             full | sampled
//   samples          instance count (default 1000)
//   rng_seed         sampling seed (default 1)
//   ida              true|false (default true)
//   parent_pruning   true|false (default false)
//   node_limit       per-instance IDA* node limit
//   state_cap        reachable-set and PDB cap
//   heavy            true marks configs that only run with --heavy
//   expect_states, expect_avg_distance   fingerprint checked after enumeration
//   output           CSV path (relative to the config file)
//   histograms       path prefix for histogram files

#include "abstraction.hpp"
#include "domains.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "mutex.hpp"
#include "pdb.hpp"
#include "reachability.hpp"
#include "search.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace spurion {

struct ExperimentConfig {
    std::string name;
    std::optional<GeneratorSpec> generator;
    std::string domain_file;
    std::string meta_file;
    std::vector<std::string> seed;
    bool seed_is_goal = false;
    std::string abstraction;
    std::vector<Variant> variants{Variant::Orgn, Variant::MtxExh, Variant::True};
    bool full_space = true;
    std::size_t samples = 1000;
    std::uint64_t rng_seed = 1;
    bool ida = true;
    IdaOptions ida_options;
    std::size_t state_cap = kDefaultStateCap;
    bool heavy = false;
    std::optional<std::size_t> expect_states;
    std::optional<double> expect_avg_distance;
    std::string output;
    std::string histograms;
};

namespace detail {

inline std::string trim(std::string s) {
    const char *ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
}

inline bool parse_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw Error(ErrorKind::Config, key + ": expected true or false, got '" + v + "'");
}

inline std::uint64_t parse_u64(const std::string &key, const std::string &v) {
    std::uint64_t x = 0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec == std::errc() && end == v.data() + v.size() && !v.empty())
        return x;
    throw Error(ErrorKind::Config, key + ": expected a non-negative integer, got '" + v + "'");
}

inline double parse_double(const std::string &key, const std::string &v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used == v.size())
            return x;
    } catch (const std::exception &) {
    }
    throw Error(ErrorKind::Config, key + ": expected a number, got '" + v + "'");
}

inline std::vector<std::string> words(const std::string &v) {
    std::istringstream in(v);
    std::vector<std::string> out;
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

inline std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Config, "cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string resolve(const std::filesystem::path &base, const std::string &p) {
    if (p.empty() || std::filesystem::path(p).is_absolute())
        return p;
    return (base / p).lexically_normal().string();
}

} // namespace detail

inline ExperimentConfig parse_config(std::string_view text, const std::filesystem::path &base_dir = {}) {
    ExperimentConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string generator_text;
    std::vector<std::string> move_table;
    bool implied = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        line = detail::trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Config, "config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string v = detail::trim(line.substr(eq + 1));
        if (key == "name")
            c.name = v;
        else if (key == "generator")
            generator_text = v;
        else if (key == "move_table")
            move_table = detail::words(v);
        else if (key == "implied_preconditions")
            implied = detail::parse_bool(key, v);
        else if (key == "domain")
            c.domain_file = detail::resolve(base_dir, v);
        else if (key == "meta")
            c.meta_file = detail::resolve(base_dir, v);
        else if (key == "seed") {
            c.seed.clear();
            c.seed_is_goal = v == "goal";
            if (v != "goal" && v != "default")
                c.seed = detail::words(v);
        } else if (key == "abstraction")
            c.abstraction += v + '\n';
        else if (key == "abstraction_file")
            c.abstraction += detail::read_file(detail::resolve(base_dir, v)) + '\n';
        else if (key == "variants") {
            c.variants.clear();
            for (const auto &w : detail::words(v))
                c.variants.push_back(parse_variant(w));
            if (c.variants.empty())
                throw Error(ErrorKind::Config, "variants: at least one variant is required");
        } else if (key == "eval") {
            if (v != "full" && v != "sampled")
                throw Error(ErrorKind::Config, "eval: expected full or sampled");
            c.full_space = v == "full";
        } else if (key == "samples")
            c.samples = detail::parse_u64(key, v);
        else if (key == "rng_seed")
            c.rng_seed = detail::parse_u64(key, v);
        else if (key == "ida")
            c.ida = detail::parse_bool(key, v);
        else if (key == "parent_pruning")
            c.ida_options.parent_pruning = detail::parse_bool(key, v);
        else if (key == "node_limit")
            c.ida_options.node_limit = detail::parse_u64(key, v);
        else if (key == "state_cap")
            c.state_cap = detail::parse_u64(key, v);
        else if (key == "heavy")
            c.heavy = detail::parse_bool(key, v);
        else if (key == "expect_states")
            c.expect_states = detail::parse_u64(key, v);
        else if (key == "expect_avg_distance")
            c.expect_avg_distance = detail::parse_double(key, v);
        else if (key == "output")
            c.output = detail::resolve(base_dir, v);
        else if (key == "histograms")
            c.histograms = detail::resolve(base_dir, v);
        else
            throw Error(ErrorKind::Config, "unknown config key: " + key);
    }
    if (!generator_text.empty()) {
        c.generator = parse_generator_spec(generator_text);
        c.generator->move_table = move_table;
        c.generator->implied_preconditions = implied;
    } else if (!move_table.empty() || implied) {
        throw Error(ErrorKind::Config, "move_table and implied_preconditions need a generator");
    }
    if (c.generator.has_value() == !c.domain_file.empty())
        throw Error(ErrorKind::Config, "exactly one of generator and domain is required");
    if (detail::trim(c.abstraction).empty())
        throw Error(ErrorKind::Config, "an abstraction is required");
    for (std::size_t i = 0; i < c.variants.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (c.variants[i] == c.variants[j])
                throw Error(ErrorKind::Config, std::string("duplicate variant ") + to_string(c.variants[i]));
    if (c.samples == 0 && (c.ida || !c.full_space))
        throw Error(ErrorKind::Config, "samples must be positive");
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path &path) {
    auto c = parse_config(detail::read_file(path), path.parent_path());
    if (c.name.empty())
        c.name = path.stem().string();
    return c;
}

struct VariantRow {
    Variant variant = Variant::Orgn;
    std::size_t entries = 0;
    std::size_t size_bytes = 0;
    double avg_h = 0.0;
    std::optional<double> avg_nodes;
    std::optional<double> mean_ratio_vs_true;
    std::optional<double> pct_improve_vs_orgn;
    std::optional<bool> dominance_ok;
};

struct ExperimentResult {
    std::string name;
    std::size_t reachable_states = 0;
    double avg_distance = 0.0;
    std::vector<VariantRow> rows;
    // Per-instance IDA* expansions, indexed like `instances`.
    std::map<Variant, std::vector<std::uint64_t>> nodes;
    std::vector<std::uint32_t> instances;
    std::string warnings;

    const VariantRow *row(Variant v) const {
        for (const auto &r : rows)
            if (r.variant == v)
                return &r;
        return nullptr;
    }
};

namespace detail {

struct LoadedDomain {
    Domain domain;
    LayoutMetadata meta;
    StateVector seed;
};

inline LoadedDomain load_domain(const ExperimentConfig &c) {
    LoadedDomain out;
    std::vector<std::string> seed_names;
    if (c.generator) {
        GeneratedDomain g = generate(*c.generator);
        out.domain = g.domain();
        out.meta = g.meta;
        seed_names = g.seed;
    } else {
        out.domain = parse_domain(read_file(c.domain_file));
        if (!c.meta_file.empty()) {
            auto [meta, seed] = parse_meta(read_file(c.meta_file));
            out.meta = meta;
            seed_names = seed;
        }
    }
    if (!c.seed.empty())
        seed_names = c.seed;
    if (c.seed_is_goal || seed_names.empty())
        out.seed = out.domain.goal;
    else
        out.seed = out.domain.state(seed_names);
    return out;
}

inline std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Solves every sampled instance; work is split by index so results do not depend on
// the thread count.
inline std::vector<std::uint64_t> solve_all(const SuccessorGenerator &gen, const PDB &pdb,
                                            const Abstraction &psi, const ReachableSet &r,
                                            const std::vector<std::uint32_t> &idx,
                                            const IdaOptions &opt, unsigned threads) {
    std::vector<std::uint64_t> out(idx.size());
    std::vector<std::exception_ptr> errors(std::max(1u, threads));
    auto work = [&](unsigned t, unsigned stride) {
        try {
            PdbHeuristic h(pdb, psi);
            for (std::size_t k = t; k < idx.size(); k += stride)
                out[k] = ida_star(gen, r[idx[k]], h, opt).nodes_expanded;
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t, threads);
        for (auto &th : pool)
            th.join();
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace detail

inline ExperimentResult run(const ExperimentConfig &c, unsigned threads = 1, bool heavy = false) {
    if (c.heavy && !heavy)
        throw Error(ErrorKind::Config, "config '" + c.name + "' is marked heavy; rerun with --heavy");
    ExperimentResult res;
    res.name = c.name;
    auto loaded = detail::load_domain(c);
    const Domain &d = loaded.domain;
    auto psi = parse_abstraction(c.abstraction, d, &loaded.meta);
    auto ad = abstract_domain(psi, d);

    auto r = enumerate(d, loaded.seed, c.state_cap);
    auto e = collect_edges(d, r);
    res.reachable_states = r.size();
    res.avg_distance = avg_distance(r, e, d.goal);
    if (c.expect_states && *c.expect_states != r.size())
        throw Error(ErrorKind::Fingerprint, "expected " + std::to_string(*c.expect_states) +
                                                " reachable states, got " + std::to_string(r.size()));
    if (c.expect_avg_distance && std::fabs(*c.expect_avg_distance - res.avg_distance) > 0.005)
        throw Error(ErrorKind::Fingerprint, "expected average distance " + detail::fmt2(*c.expect_avg_distance) +
                                                ", got " + std::to_string(res.avg_distance));

    res.instances = sample_indices(r.size(), c.samples, c.rng_seed);
    std::map<Variant, PDB> pdbs;
    std::optional<StateTable> image;
    for (Variant v : c.variants) {
        switch (v) {
        case Variant::Orgn:
            pdbs.emplace(v, build(ad, NoFilter{}, v, c.state_cap));
            break;
        case Variant::MtxExh: {
            auto pairs = abstract_pair_image(psi, exhaustive_pairs(d, r));
            pdbs.emplace(v, build(ad, MutexFilter{&pairs}, v, c.state_cap));
            break;
        }
        case Variant::MtxH2: {
            auto pairs = abstract_pair_image(psi, h2_pairs(d, ground(d), loaded.seed));
            pdbs.emplace(v, build(ad, MutexFilter{&pairs}, v, c.state_cap));
            break;
        }
        case Variant::True:
            if (!image)
                image = abstract_image(psi, r);
            pdbs.emplace(v, build(ad, StateSetFilter{&*image}, v, c.state_cap));
            break;
        case Variant::Pure:
            pdbs.emplace(v, build_pure(ad, r, e));
            break;
        }
    }

    // Heuristic values over the evaluation set.
    std::map<Variant, std::vector<double>> hv;
    for (const auto &[v, pdb] : pdbs) {
        PdbHeuristic h(pdb, psi);
        auto &vals = hv[v];
        auto push = [&](std::span<const Symbol> s) {
            auto x = h(s);
            if (x == kInfinity)
                throw Error(ErrorKind::NoSolution, std::string(to_string(v)) + " PDB misses a genuine state");
            vals.push_back(static_cast<double>(x));
        };
        if (c.full_space)
            for (std::size_t k = 0; k < r.size(); ++k)
                push(r[k]);
        else
            for (auto k : res.instances)
                push(r[k]);
    }

    if (c.ida) {
        SuccessorGenerator gen(d);
        for (const auto &[v, pdb] : pdbs)
            res.nodes[v] = detail::solve_all(gen, pdb, psi, r, res.instances, c.ida_options, threads);
    }

    std::ostringstream warn;
    for (Variant v : c.variants) {
        const PDB &pdb = pdbs.at(v);
        VariantRow row;
        row.variant = v;
        row.entries = pdb.size();
        row.size_bytes = pdb.size_bytes();
        const auto &vals = hv.at(v);
        double sum = 0.0;
        for (double x : vals)
            sum += x;
        row.avg_h = vals.empty() ? 0.0 : sum / static_cast<double>(vals.size());
        if (c.ida) {
            const auto &n = res.nodes.at(v);
            double total = 0.0;
            for (auto x : n)
                total += static_cast<double>(x);
            row.avg_nodes = n.empty() ? 0.0 : total / static_cast<double>(n.size());
            if (auto t = res.nodes.find(Variant::True); t != res.nodes.end()) {
                std::vector<double> a(n.begin(), n.end()), b(t->second.begin(), t->second.end());
                for (std::size_t k = 0; k < b.size(); ++k)
                    if (b[k] == 0.0)
                        a[k] = b[k] = 1.0;
                std::ostringstream w;
                auto s = avg_of_ratios(a, b, &w);
                row.mean_ratio_vs_true = s.mean;
                row.dominance_ok = s.dominance_ok;
                if (!s.dominance_ok)
                    warn << to_string(v) << " vs TRUE: " << w.str();
            }
        }
        if (auto o = hv.find(Variant::Orgn); o != hv.end()) {
            // Instances whose ORGN value is 0 have no defined percentage and are skipped.
            std::vector<double> before, after;
            for (std::size_t k = 0; k < vals.size(); ++k)
                if (o->second[k] > 0.0) {
                    before.push_back(o->second[k]);
                    after.push_back(vals[k]);
                }
            row.pct_improve_vs_orgn = pct_improvement(before, after);
        }
        res.rows.push_back(row);
    }
    res.warnings = warn.str();
    return res;
}

inline constexpr const char *kCsvHeader =
    "variant,entries,size_bytes,avg_h,avg_nodes,mean_ratio_vs_true,pct_improve_vs_orgn,dominance_ok";

inline std::string to_csv(const ExperimentResult &res) {
    std::string out = std::string(kCsvHeader) + '\n';
    for (const auto &r : res.rows) {
        out += to_string(r.variant);
        out += ',' + std::to_string(r.entries);
        out += ',' + std::to_string(r.size_bytes);
        out += ',' + detail::fmt2(r.avg_h);
        out += ',' + (r.avg_nodes ? detail::fmt2(*r.avg_nodes) : std::string());
        out += ',' + (r.mean_ratio_vs_true ? detail::fmt2(*r.mean_ratio_vs_true) : std::string());
        out += ',' + (r.pct_improve_vs_orgn ? detail::fmt2(*r.pct_improve_vs_orgn) : std::string());
        out += ',' + (r.dominance_ok ? std::string(*r.dominance_ok ? "true" : "false") : std::string());
        out += '\n';
    }
    return out;
}

// Per-instance node ratios: every variant against TRUE with unit buckets, TRUE and PURE
// against ORGN with 0.1 buckets. Keys are file suffixes.
inline std::map<std::string, Histogram> instance_histograms(const ExperimentResult &res) {
    std::map<std::string, Histogram> out;
    auto ratios = [&](Variant a, Variant b) {
        const auto &x = res.nodes.at(a), &y = res.nodes.at(b);
        std::vector<double> v;
        for (std::size_t k = 0; k < x.size(); ++k)
            v.push_back(y[k] ? static_cast<double>(x[k]) / static_cast<double>(y[k]) : 1.0);
        return v;
    };
    const bool has_true = res.nodes.count(Variant::True), has_orgn = res.nodes.count(Variant::Orgn);
    for (const auto &[v, n] : res.nodes) {
        if (has_true && v != Variant::True)
            out[std::string(to_string(v)) + "_vs_TRUE"] = histogram(ratios(v, Variant::True), 1.0);
        if (has_orgn && (v == Variant::True || v == Variant::Pure))
            out[std::string(to_string(v)) + "_vs_ORGN"] = histogram(ratios(v, Variant::Orgn), 0.1);
    }
    return out;
}

struct ClassifyRow {
    std::size_t spurious = 0;
    std::size_t nonspurious = 0;
    double node_ratio = 1.0;
};

// Rows: spurious >= non-spurious or not. Columns: ORGN needs more than twice the TRUE
// nodes ("slow") or not ("normal").
struct HarmTable {
    std::size_t many_normal = 0, many_slow = 0, few_normal = 0, few_slow = 0;
};

inline HarmTable classify(const std::vector<ClassifyRow> &rows) {
    HarmTable t;
    for (const auto &r : rows) {
        const bool many = r.spurious >= r.nonspurious;
        const bool slow = r.node_ratio > 2.0;
        (many ? (slow ? t.many_slow : t.many_normal) : (slow ? t.few_slow : t.few_normal))++;
    }
    return t;
}

inline std::optional<ClassifyRow> classify_row(const ExperimentResult &res) {
    const auto *o = res.row(Variant::Orgn), *t = res.row(Variant::True);
    if (!o || !t || !o->mean_ratio_vs_true)
        return std::nullopt;
    return ClassifyRow{o->entries - t->entries, t->entries, *o->mean_ratio_vs_true};
}

inline std::string harm_table_text(const HarmTable &t) {
    std::string out = "category,ida_normal,ida_slow\n";
    out += "spurious>=nonspurious," + std::to_string(t.many_normal) + ',' + std::to_string(t.many_slow) + '\n';
    out += "spurious<nonspurious," + std::to_string(t.few_normal) + ',' + std::to_string(t.few_slow) + '\n';
    return out;
}

} // namespace spurion
