#include "spurion/abstraction.hpp"
#include "spurion/domains.hpp"
#include "spurion/mutex.hpp"
#include "spurion/pdb.hpp"
#include "spurion/reachability.hpp"

#include <gtest/gtest.h>

#include <set>
#include <tuple>

using namespace spurion;

namespace {

using PairKey = std::tuple<std::size_t, Symbol, std::size_t, Symbol>;

// Brute-force co-occurrence set over a state list.
std::set<PairKey> cooccurring(const ReachableSet &r) {
    std::set<PairKey> out;
    for (std::size_t k = 0; k < r.size(); ++k) {
        auto s = r[k];
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j)
                out.emplace(i, s[i], j, s[j]);
    }
    return out;
}

struct Loaded {
    GeneratedDomain g;
    Domain d;
    StateVector seed;
    ReachableSet r;
};

Loaded load(const char *spec) {
    Loaded l;
    l.g = generate(parse_generator_spec(spec));
    l.d = l.g.domain();
    l.seed = l.g.seed_state(l.d);
    l.r = enumerate(l.d, l.seed);
    return l;
}

} // namespace

TEST(Mutex, ExhaustivePairsMatchBruteForce) {
    for (const char *spec : {"stp-standard 2 2", "toh-stack 3 3", "scanalyzer 4", "bw-height 3 3"}) {
        auto l = load(spec);
        auto t = exhaustive_pairs(l.d, l.r);
        auto oracle = cooccurring(l.r);
        EXPECT_EQ(t.count_pairs(), oracle.size()) << spec;
        for (const auto &[i, a, j, b] : oracle)
            EXPECT_FALSE(t.is_mutex(i, a, j, b)) << spec;
    }
}

// mutex(h2) must be a subset of mutex(exhaustive): every pair realized by a reachable
// state has to be reached by h2.
TEST(Mutex, H2IsSoundAgainstExhaustive) {
    for (const char *spec : {"stp-standard 2 2", "stp-dual 2 2", "toh-disk 3 3", "toh-binary 3 3",
                             "toh-stack 3 3", "scanalyzer 6"}) {
        auto l = load(spec);
        auto ex = exhaustive_pairs(l.d, l.r);
        auto h2 = h2_pairs(l.d, ground(l.d), l.seed);
        std::size_t violations = 0;
        const std::size_t n = l.d.state_len, k = l.d.alphabet.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < k; ++a) {
                if (ex.single(i, static_cast<Symbol>(a)) && !h2.single(i, static_cast<Symbol>(a)))
                    ++violations;
                for (std::size_t j = i + 1; j < n; ++j)
                    for (std::size_t b = 0; b < k; ++b)
                        if (ex.pair(i, static_cast<Symbol>(a), j, static_cast<Symbol>(b)) &&
                            !h2.pair(i, static_cast<Symbol>(a), j, static_cast<Symbol>(b)))
                            ++violations;
            }
        EXPECT_EQ(violations, 0u) << spec;
        EXPECT_GE(h2.count_pairs(), ex.count_pairs()) << spec;
    }
}

TEST(Mutex, H2FindsHanoiPegInvariants) {
    // In the binary encoding a disk sits on exactly one peg, which h2 detects.
    auto l = load("toh-binary 2 3");
    auto h2 = h2_pairs(l.d, ground(l.d), l.seed);
    auto one = l.d.symbol("1");
    auto at = [&](const char *label) { return l.g.meta.groups.at("disk_on_peg").at(label).front(); };
    EXPECT_TRUE(h2.is_mutex(at("1@1"), one, at("1@2"), one));
    EXPECT_TRUE(h2.is_mutex(at("2@1"), one, at("2@3"), one));
    EXPECT_FALSE(h2.is_mutex(at("1@1"), one, at("2@3"), one));
}

// The 2x2 puzzle keeps the cyclic order of its tiles, so tile 1 top-left and tile 2
// bottom-left never co-occur. Under 3 -> B that pair survives in the abstract image.
TEST(Mutex, AbstractionBasedMutexInTwoByTwo) {
    auto l = load("stp-standard 2 2");
    const Symbol t1 = l.d.symbol("1"), t2 = l.d.symbol("2"), blank = l.d.symbol("B");
    bool seen = false;
    for (std::size_t k = 0; k < l.r.size(); ++k)
        seen = seen || (l.r[k][0] == t1 && l.r[k][2] == t2);
    ASSERT_FALSE(seen);

    auto psi = parse_abstraction("map B <- 3", l.d);
    auto image = abstract_pair_image(psi, exhaustive_pairs(l.d, l.r));
    EXPECT_TRUE(is_abstraction_based_mutex(image, {0, t1}, {2, t2}));
    // Two abstract blanks are not a mutex: one of them is always a 3.
    EXPECT_FALSE(is_abstraction_based_mutex(image, {0, blank}, {1, blank}));
    EXPECT_TRUE(state_has_mutex(image, StateVector{t1, blank, t2, blank}));
    EXPECT_FALSE(state_has_mutex(image, psi(l.d.goal)));
}

TEST(Mutex, DumpListsMutexPairs) {
    auto l = load("stp-standard 2 2");
    auto text = dump_mutexes(l.d, exhaustive_pairs(l.d, l.r));
    EXPECT_NE(text.find("mutex 0=1 2=2\n"), std::string::npos);
    EXPECT_NE(text.find("mutex 0=1 1=1\n"), std::string::npos);
    EXPECT_EQ(text.find("mutex 0=1 1=2\n"), std::string::npos);
}

TEST(Mutex, GroundingExpandsVariables) {
    auto l = load("stp-standard 2 2");
    auto gs = ground(l.d);
    // Positions are unrestricted, so the tile variable takes all four symbols.
    EXPECT_EQ(gs.size(), l.d.operators.size() * 4);
    for (const auto &g : gs) {
        EXPECT_EQ(g.pre.size(), 2u);
        EXPECT_EQ(g.writes.size(), 2u);
    }
}
