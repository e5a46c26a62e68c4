#include "spurion/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace spurion;

namespace {

std::optional<ErrorKind> kind_of(const std::string &text) {
    try {
        parse_config(text);
    } catch (const Error &e) {
        return e.kind();
    }
    return std::nullopt;
}

const char *kSmall = "generator = stp-dual 2 3\n"
                     "abstraction = map 2 <- 2,6\n"
                     "variants = ORGN MTX_EXH MTX_H2 TRUE PURE\n"
                     "samples = 60\n"
                     "rng_seed = 5\n";

} // namespace

TEST(Harness, ParsesEveryKey) {
    auto c = parse_config("# comment\n"
                          "name = demo\n"
                          "generator = scanalyzer 4   # trailing\n"
                          "move_table = 0:2 1:3 0:3:a\n"
                          "seed = default\n"
                          "abstraction = keep belts 0,1\n"
                          "abstraction = keep bln_analyzed all\n"
                          "variants = ORGN TRUE\n"
                          "eval = sampled\n"
                          "samples = 10\n"
                          "rng_seed = 9\n"
                          "ida = false\n"
                          "parent_pruning = true\n"
                          "node_limit = 1000\n"
                          "state_cap = 5000\n"
                          "expect_states = 384\n"
                          "expect_avg_distance = 5.25\n",
                          "/tmp/base");
    EXPECT_EQ(c.name, "demo");
    ASSERT_TRUE(c.generator);
    EXPECT_EQ(c.generator->family, "scanalyzer");
    EXPECT_EQ(c.generator->move_table.size(), 3u);
    EXPECT_EQ(c.abstraction, "keep belts 0,1\nkeep bln_analyzed all\n");
    EXPECT_EQ(c.variants, (std::vector<Variant>{Variant::Orgn, Variant::True}));
    EXPECT_FALSE(c.full_space);
    EXPECT_EQ(c.samples, 10u);
    EXPECT_EQ(c.rng_seed, 9u);
    EXPECT_FALSE(c.ida);
    EXPECT_TRUE(c.ida_options.parent_pruning);
    EXPECT_EQ(c.ida_options.node_limit, 1000u);
    EXPECT_EQ(c.state_cap, 5000u);
    EXPECT_EQ(c.expect_states, 384u);
    EXPECT_DOUBLE_EQ(*c.expect_avg_distance, 5.25);
}

TEST(Harness, ConfigErrors) {
    EXPECT_EQ(kind_of("abstraction = map 1 <- 2\n"), ErrorKind::Config);
    EXPECT_EQ(kind_of("generator = toh-disk 3 3\n"), ErrorKind::Config);
    EXPECT_EQ(kind_of("generator = toh-disk 3 3\nabstraction = map 1 <- 2\nbogus = 1\n"), ErrorKind::Config);
    EXPECT_EQ(kind_of("generator = toh-disk 3 3\nabstraction = map 1 <- 2\nvariants = ORGN ORGN\n"),
              ErrorKind::Config);
    EXPECT_EQ(kind_of("generator = toh-disk 3 3\nabstraction = map 1 <- 2\nsamples = -3\n"), ErrorKind::Config);
    EXPECT_EQ(kind_of("generator = toh-disk 3 3\nabstraction = map 1 <- 2\nida = maybe\n"), ErrorKind::Config);
    EXPECT_EQ(kind_of("generator = toh-disk 3 3\nabstraction = map 1 <- 2\nno equals sign\n"), ErrorKind::Config);
    EXPECT_EQ(kind_of("generator = toh-disk 3 3\ndomain = x.psvn\nabstraction = map 1 <- 2\n"), ErrorKind::Config);
    EXPECT_EQ(kind_of("move_table = 1:2\ndomain = x.psvn\nabstraction = map 1 <- 2\n"), ErrorKind::Config);
}

TEST(Harness, LoadConfigResolvesPathsAndDefaultsName) {
    auto dir = std::filesystem::temp_directory_path() / "spurion_harness_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "abs.txt") << "map 1 <- 1,2\n";
        std::ofstream(dir / "toy.cfg") << "generator = toh-disk 3 3\nabstraction_file = abs.txt\noutput = out.csv\n";
    }
    auto c = load_config(dir / "toy.cfg");
    EXPECT_EQ(c.name, "toy");
    EXPECT_EQ(c.abstraction, "map 1 <- 1,2\n\n");
    EXPECT_EQ(std::filesystem::path(c.output), dir / "out.csv");
    std::filesystem::remove_all(dir);
}

TEST(Harness, GoalOnlyDomainHasZeroHeuristic) {
    auto c = parse_config("generator = toh-disk 1 3\n"
                          "seed = goal\n"
                          "abstraction = map 1 <- 1,2\n"
                          "variants = ORGN\n"
                          "samples = 3\n");
    auto res = run(c);
    EXPECT_EQ(res.reachable_states, 3u);
    ASSERT_EQ(res.rows.size(), 1u);
    EXPECT_EQ(to_csv(res), std::string(kCsvHeader) + "\nORGN," + std::to_string(res.rows[0].entries) + "," +
                               std::to_string(res.rows[0].size_bytes) + ",0.33,0.33,,0.00,\n");
}

TEST(Harness, CsvIsIndependentOfThreadCount) {
    auto c = parse_config(kSmall);
    auto one = run(c, 1);
    auto three = run(c, 3);
    EXPECT_EQ(to_csv(one), to_csv(three));
    EXPECT_EQ(one.nodes, three.nodes);
}

// The reported ratio column must be the mean of per-instance ratios, recomputed here
// from the stored node counts.
TEST(Harness, RatioColumnIsAverageOfPerInstanceRatios) {
    auto res = run(parse_config(kSmall));
    const auto &tru = res.nodes.at(Variant::True);
    for (const auto &row : res.rows) {
        const auto &n = res.nodes.at(row.variant);
        double sum = 0.0;
        for (std::size_t k = 0; k < n.size(); ++k)
            sum += tru[k] ? static_cast<double>(n[k]) / static_cast<double>(tru[k]) : 1.0;
        ASSERT_TRUE(row.mean_ratio_vs_true);
        EXPECT_NEAR(*row.mean_ratio_vs_true, sum / static_cast<double>(n.size()), 1e-12)
            << to_string(row.variant);
    }
    EXPECT_DOUBLE_EQ(*res.row(Variant::True)->mean_ratio_vs_true, 1.0);
    EXPECT_DOUBLE_EQ(*res.row(Variant::Orgn)->pct_improve_vs_orgn, 0.0);
    EXPECT_GE(*res.row(Variant::True)->pct_improve_vs_orgn, 0.0);
}

TEST(Harness, FingerprintMismatchIsReported) {
    auto c = parse_config(std::string(kSmall) + "expect_states = 361\n");
    try {
        run(c);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Fingerprint);
    }
    auto ok = parse_config(std::string(kSmall) + "expect_states = 360\nida = false\n");
    EXPECT_EQ(run(ok).reachable_states, 360u);
}

TEST(Harness, HeavyConfigNeedsFlag) {
    auto c = parse_config(std::string(kSmall) + "heavy = true\n");
    EXPECT_THROW(run(c), Error);
    EXPECT_NO_THROW(run(c, 1, true));
}

TEST(Harness, HistogramKeys) {
    auto res = run(parse_config(kSmall));
    auto h = instance_histograms(res);
    std::vector<std::string> keys;
    for (const auto &[k, v] : h) {
        keys.push_back(k);
        EXPECT_EQ(v.total(), res.instances.size());
    }
    EXPECT_EQ(keys, (std::vector<std::string>{"MTX_EXH_vs_TRUE", "MTX_H2_vs_TRUE", "ORGN_vs_TRUE", "PURE_vs_ORGN",
                                              "PURE_vs_TRUE", "TRUE_vs_ORGN"}));
}

TEST(Harness, HarmClassification) {
    auto t = classify({{10, 5, 3.0}, {10, 5, 2.0}, {1, 5, 2.5}, {1, 5, 1.0}, {5, 5, 2.01}});
    EXPECT_EQ(t.many_slow, 2u);
    EXPECT_EQ(t.many_normal, 1u);
    EXPECT_EQ(t.few_slow, 1u);
    EXPECT_EQ(t.few_normal, 1u);
    EXPECT_EQ(harm_table_text(t), "category,ida_normal,ida_slow\n"
                                  "spurious>=nonspurious,1,2\n"
                                  "spurious<nonspurious,1,1\n");

    auto res = run(parse_config(kSmall));
    auto row = classify_row(res);
    ASSERT_TRUE(row);
    EXPECT_EQ(row->spurious + row->nonspurious, res.row(Variant::Orgn)->entries);
    EXPECT_EQ(row->nonspurious, res.row(Variant::True)->entries);
}
