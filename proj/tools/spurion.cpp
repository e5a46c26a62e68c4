#include "spurion/spurion.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace spurion;

namespace {

struct SourceOptions {
    std::string generator;
    std::vector<std::string> moves;
    bool implied = false;
    std::string domain;
    std::string meta;
    std::string seed;

    void add(CLI::App *app) {
        app->add_option("-g,--generator", generator, "generator spec, e.g. \"toh-stack 9 4\"");
        app->add_option("--move", moves, "generator move table entry (repeatable)");
        app->add_flag("--implied-preconditions", implied, "toh-stack with strengthened preconditions");
        app->add_option("-d,--domain", domain, "PSVN domain file");
        app->add_option("-m,--meta", meta, "layout metadata file");
        app->add_option("-s,--seed", seed, "seed state (symbols), \"goal\" or \"default\"");
    }

    ExperimentConfig config() const {
        ExperimentConfig c;
        if (generator.empty() == domain.empty())
            throw Error(ErrorKind::Config, "give exactly one of --generator and --domain");
        if (!generator.empty()) {
            c.generator = parse_generator_spec(generator);
            c.generator->move_table = moves;
            c.generator->implied_preconditions = implied;
        }
        c.domain_file = domain;
        c.meta_file = meta;
        c.seed_is_goal = seed == "goal";
        if (!seed.empty() && seed != "goal" && seed != "default")
            c.seed = detail::words(seed);
        return c;
    }
};

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Config, "cannot write " + path);
    out << text;
}

std::ofstream open_binary(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Config, "cannot write " + path);
    return out;
}

std::string abstraction_text(const std::vector<std::string> &lines, const std::string &file) {
    std::string text;
    for (const auto &l : lines)
        text += l + '\n';
    if (!file.empty())
        text += detail::read_file(file);
    if (detail::trim(text).empty())
        throw Error(ErrorKind::Config, "an abstraction is required (--abstraction or --abstraction-file)");
    return text;
}

struct PdbJob {
    detail::LoadedDomain loaded;
    Abstraction psi;
    PDB pdb;
};

PdbJob build_pdb(const ExperimentConfig &c, const std::string &abs_text, Variant v, std::size_t cap) {
    auto loaded = detail::load_domain(c);
    const Domain &d = loaded.domain;
    auto psi = parse_abstraction(abs_text, d, &loaded.meta);
    auto ad = abstract_domain(psi, d);
    std::optional<ReachableSet> r;
    auto reachable = [&]() -> const ReachableSet & {
        if (!r)
            r = enumerate(d, loaded.seed, cap);
        return *r;
    };
    PDB pdb;
    switch (v) {
    case Variant::Orgn:
        pdb = build(ad, NoFilter{}, v, cap);
        break;
    case Variant::MtxExh: {
        auto pairs = abstract_pair_image(psi, exhaustive_pairs(d, reachable()));
        pdb = build(ad, MutexFilter{&pairs}, v, cap);
        break;
    }
    case Variant::MtxH2: {
        auto pairs = abstract_pair_image(psi, h2_pairs(d, ground(d), loaded.seed));
        pdb = build(ad, MutexFilter{&pairs}, v, cap);
        break;
    }
    case Variant::True: {
        auto image = abstract_image(psi, reachable());
        pdb = build(ad, StateSetFilter{&image}, v, cap);
        break;
    }
    case Variant::Pure:
        pdb = build_pure(ad, reachable(), collect_edges(d, reachable()));
        break;
    }
    return {std::move(loaded), std::move(psi), std::move(pdb)};
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"spurion: abstraction heuristics, spurious states and mutex filtering"};
    app.require_subcommand(1);

    // gen
    auto *gen = app.add_subcommand("gen", "write a generated domain (.psvn and .meta)");
    SourceOptions gen_src;
    std::string gen_out;
    bool gen_validate = false, gen_heavy = false;
    gen->add_option("spec", gen_src.generator, "generator spec, e.g. \"toh-stack 9 4\"")->required();
    gen->add_option("--move", gen_src.moves, "move table entry (repeatable)");
    gen->add_flag("--implied-preconditions", gen_src.implied, "toh-stack with strengthened preconditions");
    gen->add_option("-o,--out", gen_out, "output prefix (default: print PSVN to stdout)");
    gen->add_flag("--validate", gen_validate, "enumerate and check the known fingerprint");
    gen->add_flag("--heavy", gen_heavy, "allow validating large fingerprints");

    // enumerate
    auto *en = app.add_subcommand("enumerate", "reachable states from the seed");
    SourceOptions en_src;
    en_src.add(en);
    std::string en_out, en_edges;
    std::size_t en_cap = kDefaultStateCap;
    en->add_option("-o,--out", en_out, "save the reachable set");
    en->add_option("--edges", en_edges, "save the transition list");
    en->add_option("--cap", en_cap, "state cap");

    // mutex
    auto *mx = app.add_subcommand("mutex", "mutex pairs by exhaustive enumeration or h2");
    SourceOptions mx_src;
    mx_src.add(mx);
    std::string mx_method = "exhaustive";
    mx->add_option("--method", mx_method, "exhaustive | h2")->check(CLI::IsMember({"exhaustive", "h2"}));

    // pdb
    auto *pd = app.add_subcommand("pdb", "build a pattern database");
    SourceOptions pd_src;
    pd_src.add(pd);
    std::vector<std::string> pd_abs;
    std::string pd_abs_file, pd_variant = "ORGN", pd_out;
    std::size_t pd_cap = kDefaultStateCap;
    pd->add_option("-a,--abstraction", pd_abs, "abstraction line (repeatable)");
    pd->add_option("-f,--abstraction-file", pd_abs_file, "abstraction file");
    pd->add_option("--variant", pd_variant, "ORGN | MTX_EXH | MTX_H2 | TRUE | PURE");
    pd->add_option("-o,--out", pd_out, "save the PDB");
    pd->add_option("--cap", pd_cap, "state cap");

    // solve
    auto *so = app.add_subcommand("solve", "IDA* with a PDB heuristic");
    SourceOptions so_src;
    so_src.add(so);
    std::vector<std::string> so_abs;
    std::string so_abs_file, so_variant = "ORGN", so_start, so_pdb;
    std::size_t so_samples = 0;
    std::uint64_t so_rng = 1;
    IdaOptions so_opt;
    bool so_strict = false;
    so->add_option("-a,--abstraction", so_abs, "abstraction line (repeatable)");
    so->add_option("-f,--abstraction-file", so_abs_file, "abstraction file");
    so->add_option("--variant", so_variant, "ORGN | MTX_EXH | MTX_H2 | TRUE | PURE");
    so->add_option("--pdb", so_pdb, "load a saved PDB instead of building one");
    so->add_option("--start", so_start, "start state (symbols)");
    so->add_option("--samples", so_samples, "solve this many sampled reachable states");
    so->add_option("--rng-seed", so_rng, "sampling seed");
    so->add_flag("--parent-pruning", so_opt.parent_pruning, "skip children equal to the grandparent");
    so->add_option("--node-limit", so_opt.node_limit, "IDA* expansion limit");
    so->add_flag("--strict", so_strict, "fail when a state misses the PDB");

    // experiment
    auto *ex = app.add_subcommand("experiment", "run experiment configs");
    std::vector<std::string> ex_configs;
    unsigned ex_threads = 1;
    bool ex_heavy = false;
    std::string ex_summary;
    ex->add_option("-c,--config", ex_configs, "config file (repeatable)")->required();
    ex->add_option("-t,--threads", ex_threads, "solver threads (results do not depend on it)")
        ->check(CLI::Range(1u, 256u));
    ex->add_flag("--heavy", ex_heavy, "allow configs marked heavy");
    ex->add_option("--summary", ex_summary, "write the harm-category table for all configs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            auto spec = parse_generator_spec(gen_src.generator);
            spec.move_table = gen_src.moves;
            spec.implied_preconditions = gen_src.implied;
            auto g = generate(spec);
            if (gen_out.empty()) {
                std::cout << g.text;
            } else {
                write_file(gen_out + ".psvn", g.text);
                write_file(gen_out + ".meta", g.meta_text());
            }
            if (gen_validate) {
                auto rep = validate(spec, gen_heavy);
                std::cerr << "states " << rep.states << " avg_distance " << detail::fmt2(rep.avg_distance)
                          << ": " << rep.message << '\n';
                if (!rep.ok)
                    return exit_code_for(ErrorKind::Fingerprint);
            }
        } else if (*en) {
            auto loaded = detail::load_domain(en_src.config());
            auto r = enumerate(loaded.domain, loaded.seed, en_cap);
            auto e = collect_edges(loaded.domain, r);
            std::uint32_t max_depth = 0;
            for (auto x : r.depth)
                max_depth = std::max(max_depth, x);
            std::cout << "states " << r.size() << "\nedges " << e.size() << "\nmax_depth " << max_depth
                      << "\navg_distance_to_goal " << detail::fmt2(avg_distance(r, e, loaded.domain.goal))
                      << '\n';
            if (!en_out.empty()) {
                auto out = open_binary(en_out);
                save_reachable(out, r);
            }
            if (!en_edges.empty()) {
                auto out = open_binary(en_edges);
                save_edges(out, e);
            }
        } else if (*mx) {
            auto loaded = detail::load_domain(mx_src.config());
            const Domain &d = loaded.domain;
            PairTable t = mx_method == "h2" ? h2_pairs(d, ground(d), loaded.seed)
                                            : exhaustive_pairs(d, enumerate(d, loaded.seed));
            std::cout << dump_mutexes(d, t);
        } else if (*pd) {
            auto job = build_pdb(pd_src.config(), abstraction_text(pd_abs, pd_abs_file),
                                 parse_variant(pd_variant), pd_cap);
            std::cout << to_string(job.pdb.variant) << " entries " << job.pdb.size() << " size_bytes "
                      << job.pdb.size_bytes() << " max_h " << job.pdb.max_distance() << '\n';
            if (!pd_out.empty()) {
                auto out = open_binary(pd_out);
                save_pdb(out, job.pdb);
            }
        } else if (*so) {
            auto c = so_src.config();
            auto text = abstraction_text(so_abs, so_abs_file);
            PdbJob job;
            if (so_pdb.empty()) {
                job = build_pdb(c, text, parse_variant(so_variant), kDefaultStateCap);
            } else {
                job.loaded = detail::load_domain(c);
                job.psi = parse_abstraction(text, job.loaded.domain, &job.loaded.meta);
                std::ifstream in(so_pdb, std::ios::binary);
                if (!in)
                    throw Error(ErrorKind::Config, "cannot read " + so_pdb);
                job.pdb = load_pdb(in);
                if (job.pdb.abstraction_digest != job.psi.digest())
                    throw Error(ErrorKind::Config, "PDB was built for a different abstraction");
            }
            const Domain &d = job.loaded.domain;
            SuccessorGenerator g(d);
            PdbHeuristic h(job.pdb, job.psi, so_strict);
            std::vector<StateVector> starts;
            if (!so_start.empty())
                starts.push_back(d.state(detail::words(so_start)));
            if (so_samples) {
                auto r = enumerate(d, job.loaded.seed);
                for (auto k : sample_indices(r.size(), so_samples, so_rng))
                    starts.emplace_back(r[k].begin(), r[k].end());
            }
            if (starts.empty())
                throw Error(ErrorKind::Config, "give --start or --samples");
            std::cout << "start,h,length,expanded,generated\n";
            for (const auto &s : starts) {
                auto res = ida_star(g, s, h, so_opt);
                std::cout << d.format(s) << ',' << h(s) << ',' << res.solution_length << ','
                          << res.nodes_expanded << ',' << res.nodes_generated << '\n';
            }
        } else if (*ex) {
            std::vector<ClassifyRow> rows;
            for (const auto &path : ex_configs) {
                auto c = load_config(path);
                auto res = run(c, ex_threads, ex_heavy);
                std::cerr << c.name << ": " << res.reachable_states << " reachable states, avg distance "
                          << detail::fmt2(res.avg_distance) << '\n'
                          << res.warnings;
                auto csv = to_csv(res);
                if (c.output.empty())
                    std::cout << "# " << c.name << '\n' << csv;
                else
                    write_file(c.output, csv);
                if (!c.histograms.empty() && !res.nodes.empty())
                    for (const auto &[suffix, hist] : instance_histograms(res))
                        write_file(c.histograms + "_" + suffix + ".txt", hist.to_text());
                if (auto row = classify_row(res))
                    rows.push_back(*row);
            }
            if (!ex_summary.empty())
                write_file(ex_summary, harm_table_text(classify(rows)));
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::bad_alloc &) {
        std::cerr << "error: out of memory\n";
        return exit_code_for(ErrorKind::Capacity);
    }
    return 0;
}
