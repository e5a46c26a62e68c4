#include "spurion/domains.hpp"
#include "spurion/reachability.hpp"
#include "spurion/search.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace spurion;

namespace {

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i)
        f *= static_cast<std::uint64_t>(i);
    return f;
}

std::uint64_t choose(int n, int k) {
    if (k < 0 || k > n)
        return 0;
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i)
        c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return c;
}

// Arrangements of n labelled blocks into at most p ordered towers (hand empty), plus
// those with one block held. With three or more positions every arrangement is reachable.
std::uint64_t blocks_world_states(int n, int p) {
    std::uint64_t empty_hand = factorial(n) * choose(n + p - 1, p - 1);
    std::uint64_t held = n ? static_cast<std::uint64_t>(n) * factorial(n - 1) * choose(n - 1 + p - 1, p - 1) : 0;
    return empty_hand + held;
}

std::size_t count_states(const char *spec) {
    auto g = generate(parse_generator_spec(spec));
    auto d = g.domain();
    return enumerate(d, g.seed_state(d)).size();
}

// Backward closure from the goal by regression, for comparison with the forward one.
std::set<StateVector> backward_closure(const Domain &d) {
    SuccessorGenerator gen(d);
    std::set<StateVector> seen{d.goal};
    std::vector<StateVector> queue{d.goal};
    std::vector<std::uint32_t> ids;
    PredecessorScratch scratch;
    for (std::size_t k = 0; k < queue.size(); ++k) {
        StateVector s = queue[k];
        gen.for_each_predecessor(s, ids, scratch, [&](std::uint32_t, std::span<const Symbol> p) {
            StateVector v(p.begin(), p.end());
            if (seen.insert(v).second)
                queue.push_back(v);
        });
    }
    return seen;
}

} // namespace

TEST(Reachability, TowersOfHanoiCountIsPegsToTheDisks) {
    for (int n = 1; n <= 5; ++n)
        for (int p = 3; p <= 4; ++p) {
            auto expected = static_cast<std::size_t>(std::pow(p, n));
            for (const char *family : {"toh-disk", "toh-binary", "toh-stack"}) {
                auto spec = std::string(family) + " " + std::to_string(n) + " " + std::to_string(p);
                EXPECT_EQ(count_states(spec.c_str()), expected) << spec;
            }
        }
}

TEST(Reachability, SlidingTileCountIsHalfOfAllPermutations) {
    EXPECT_EQ(count_states("stp-standard 2 2"), 12u);
    EXPECT_EQ(count_states("stp-dual 2 2"), 12u);
    EXPECT_EQ(count_states("stp-standard 2 3"), factorial(6) / 2);
    EXPECT_EQ(count_states("stp-dual 2 3"), factorial(6) / 2);
}

TEST(Reachability, BlocksWorldCountsMatchClosedForm) {
    for (int n = 1; n <= 5; ++n)
        for (int p = 3; p <= 4; ++p) {
            if (n == 5 && p == 4)
                continue;
            auto expected = blocks_world_states(n, p);
            for (const char *family : {"bw-top", "bw-height", "bw-stack"}) {
                auto spec = std::string(family) + " " + std::to_string(n) + " " + std::to_string(p);
                EXPECT_EQ(count_states(spec.c_str()), expected) << spec;
            }
        }
    EXPECT_EQ(blocks_world_states(9, 3), 36'288'000u);
    // Two positions and a one-block hand only shuttle blocks between two stacks.
    EXPECT_EQ(count_states("bw-top 3 2"), 7u);
}

TEST(Reachability, ScanalyzerCountIsPermutationsTimesFlags) {
    EXPECT_EQ(count_states("scanalyzer 2"), 2u * 4u);
    EXPECT_EQ(count_states("scanalyzer 4"), factorial(4) * 16u);
}

TEST(Reachability, ForwardAndBackwardClosuresAgreeOnInvertibleDomains) {
    for (const char *spec : {"toh-stack 3 3", "toh-disk 3 4", "toh-binary 3 3", "stp-standard 2 3",
                             "stp-dual 2 3"}) {
        auto g = generate(parse_generator_spec(spec));
        auto d = g.domain();
        auto r = enumerate(d, d.goal);
        auto back = backward_closure(d);
        ASSERT_EQ(back.size(), r.size()) << spec;
        for (std::size_t k = 0; k < r.size(); ++k)
            EXPECT_TRUE(back.count(StateVector(r[k].begin(), r[k].end()))) << spec;
    }
}

TEST(Reachability, DistancesMatchBreadthFirstOracle) {
    for (const char *spec : {"toh-stack 3 3", "stp-dual 2 3", "bw-top 3 2", "scanalyzer 4"}) {
        auto g = generate(parse_generator_spec(spec));
        auto d = g.domain();
        auto r = enumerate(d, g.seed_state(d));
        auto e = collect_edges(d, r);
        auto dist = distances_to(r, e, d.goal);
        for (std::size_t k = 0; k < r.size(); k += 7)
            EXPECT_EQ(dist[k], bfs_oracle(d, r[k], d.goal)) << spec;
    }
}

TEST(Reachability, AverageDistanceOfSmallTowers) {
    // 2 disks, 3 pegs: distances 0,1,1,2,2,3,3,3,3... computed by hand from the 9-state graph.
    auto g = generate(parse_generator_spec("toh-disk 2 3"));
    auto d = g.domain();
    auto r = enumerate(d, d.goal);
    auto dist = distances_to(r, collect_edges(d, r), d.goal);
    std::multiset<std::uint32_t> got(dist.begin(), dist.end());
    EXPECT_EQ(got, (std::multiset<std::uint32_t>{0, 1, 1, 2, 2, 3, 3, 3, 3}));
}

TEST(Reachability, CapIsEnforced) {
    auto g = generate(parse_generator_spec("toh-disk 4 3"));
    auto d = g.domain();
    EXPECT_THROW(enumerate(d, d.goal, 10), Error);
    try {
        enumerate(d, d.goal, 10);
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Capacity);
    }
}

TEST(Reachability, SaveLoadRoundTrip) {
    auto g = generate(parse_generator_spec("stp-dual 2 3"));
    auto d = g.domain();
    auto r = enumerate(d, d.goal);
    auto e = collect_edges(d, r);
    std::stringstream buf;
    save_reachable(buf, r);
    save_edges(buf, e);
    auto r2 = load_reachable(buf);
    auto e2 = load_edges(buf);
    ASSERT_EQ(r2.size(), r.size());
    EXPECT_EQ(r2.depth, r.depth);
    for (std::size_t k = 0; k < r.size(); ++k)
        EXPECT_TRUE(std::equal(r[k].begin(), r[k].end(), r2[k].begin()));
    EXPECT_EQ(e2.edges, e.edges);
}

TEST(Reachability, SamplingIsSeededAndInRange) {
    auto a = sample_indices(1000, 200, 7), b = sample_indices(1000, 200, 7), c = sample_indices(1000, 200, 8);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (auto x : a)
        EXPECT_LT(x, 1000u);
    auto dst = sample_indices_distinct(50, 50, 3);
    EXPECT_EQ(std::set<std::uint32_t>(dst.begin(), dst.end()).size(), 50u);
    EXPECT_THROW(sample_indices_distinct(5, 6, 1), Error);
}

TEST(Reachability, StrengthenedPreconditionsKeepGenuineBehaviour) {
    auto g = generate(parse_generator_spec("toh-stack 3 3"));
    auto d = g.domain();
    auto r = enumerate(d, g.seed_state(d));
    auto strong = strengthen_preconditions(d, r);
    auto r2 = enumerate(strong, g.seed_state(d));
    EXPECT_EQ(r2.size(), r.size());
    EXPECT_EQ(collect_edges(strong, r2).size(), collect_edges(d, r).size());
}
