#pragma once

#include "error.hpp"
#include "match_tree.hpp"
#include "psvn.hpp"
#include "state_table.hpp"

#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <vector>

namespace spurion {

inline constexpr std::size_t kDefaultStateCap = 500'000'000;

// Indexed arena of distinct states with a hash index.
class StateArena {
    std::size_t len_ = 0;
    std::vector<Symbol> cells_;
    StateTable index_;

public:
    StateArena() = default;
    explicit StateArena(std::size_t len) : len_(len), index_(len) {}

    std::size_t state_len() const { return len_; }
    std::size_t size() const { return index_.size(); }

    std::span<const Symbol> operator[](std::size_t id) const {
        return {cells_.data() + id * len_, len_};
    }

    // Returns {id, inserted}.
    std::pair<std::uint32_t, bool> insert(std::span<const Symbol> s) {
        auto id = static_cast<std::uint32_t>(size());
        auto r = index_.insert(s, id);
        if (r.second)
            cells_.insert(cells_.end(), s.begin(), s.end());
        return r;
    }

    std::optional<std::uint32_t> find(std::span<const Symbol> s) const {
        const std::uint32_t *v = index_.find(s);
        if (!v)
            return std::nullopt;
        return *v;
    }

    const std::vector<Symbol> &cells() const { return cells_; }
    const StateTable &index() const { return index_; }
};

struct ReachableSet {
    StateArena states;
    StateVector seed;
    // BFS depth from the seed, parallel to states.
    std::vector<std::uint32_t> depth;

    std::size_t size() const { return states.size(); }
    std::span<const Symbol> operator[](std::size_t id) const { return states[id]; }
};

struct Edge {
    std::uint32_t from;
    std::uint32_t to;
    std::uint32_t op;

    friend bool operator==(const Edge &, const Edge &) = default;
    friend auto operator<=>(const Edge &, const Edge &) = default;
};

// Edges over state ids of a ReachableSet, in BFS/operator order.
struct EdgeSet {
    std::vector<Edge> edges;
    std::size_t size() const { return edges.size(); }
};

// Forward breadth-first closure of seed; states are numbered in discovery order.
inline ReachableSet enumerate(const Domain &d, std::span<const Symbol> seed,
                              std::size_t cap = kDefaultStateCap) {
    if (!d.is_valid_state(seed))
        throw Error(ErrorKind::Domain, "seed state is not valid in domain " + d.name);
    ReachableSet r;
    r.seed.assign(seed.begin(), seed.end());
    r.states = StateArena(d.state_len);
    r.states.insert(seed);
    r.depth.push_back(0);
    SuccessorGenerator gen(d);
    std::vector<std::uint32_t> ids;
    StateVector buffer;
    StateVector current;
    for (std::size_t next = 0; next < r.states.size(); ++next) {
        auto s = r.states[next];
        current.assign(s.begin(), s.end());
        const std::uint32_t dist = r.depth[next] + 1;
        gen.for_each_successor(current, ids, buffer,
                               [&](std::uint32_t id, std::span<const Symbol> succ) {
                                   if (!d.is_valid_state(succ))
                                       throw Error(ErrorKind::Domain,
                                                   "operator " + d.operators[id].label +
                                                       " leaves the position domains");
                                   if (r.states.insert(succ).second) {
                                       r.depth.push_back(dist);
                                       if (r.states.size() > cap)
                                           throw Error(ErrorKind::Capacity,
                                                       "reachable set exceeds cap of " +
                                                           std::to_string(cap) + " states");
                                   }
                               });
    }
    return r;
}

inline EdgeSet collect_edges(const Domain &d, const ReachableSet &r) {
    EdgeSet out;
    SuccessorGenerator gen(d);
    std::vector<std::uint32_t> ids;
    StateVector buffer;
    for (std::size_t k = 0; k < r.size(); ++k)
        gen.for_each_successor(r[k], ids, buffer,
                               [&](std::uint32_t op, std::span<const Symbol> succ) {
                                   auto to = r.states.find(succ);
                                   if (!to)
                                       throw Error(ErrorKind::Invalid,
                                                   "reachable set is not closed");
                                   out.edges.push_back({static_cast<std::uint32_t>(k), *to, op});
                               });
    return out;
}

// Pins every wildcard lhs cell on which all genuine states enabling the operator agree,
// and drops operators no genuine state enables. Behaviour on genuine states is unchanged.
inline Domain strengthen_preconditions(const Domain &d, const ReachableSet &r) {
    const std::size_t n = d.state_len;
    std::vector<StateVector> common(d.operators.size());
    std::vector<std::vector<bool>> agree(d.operators.size());
    for (const auto &edge : collect_edges(d, r).edges) {
        auto s = r[edge.from];
        auto &c = common[edge.op];
        auto &a = agree[edge.op];
        if (c.empty()) {
            c.assign(s.begin(), s.end());
            a.assign(n, true);
            continue;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (c[i] != s[i])
                a[i] = false;
    }
    Domain out = d;
    out.operators.clear();
    for (std::size_t k = 0; k < d.operators.size(); ++k) {
        if (common[k].empty())
            continue;
        Operator op = d.operators[k];
        for (std::size_t i = 0; i < n; ++i)
            if (op.lhs[i].is_underscore() && agree[k][i])
                op.lhs[i] = Cell::constant(common[k][i]);
        out.operators.push_back(std::move(op));
    }
    return out;
}

// Uniform integer in [0, n) by rejection; independent of library distribution details.
inline std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Indices drawn uniformly with replacement.
inline std::vector<std::uint32_t> sample_indices(std::size_t population, std::size_t k,
                                                 std::uint64_t rng_seed) {
    std::vector<std::uint32_t> out;
    if (k == 0)
        return out;
    if (population == 0)
        throw Error(ErrorKind::Invalid, "cannot sample from an empty set");
    std::mt19937_64 rng(rng_seed);
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        out.push_back(static_cast<std::uint32_t>(uniform_below(rng, population)));
    return out;
}

// Without replacement (partial Fisher-Yates); k must not exceed the population.
inline std::vector<std::uint32_t> sample_indices_distinct(std::size_t population, std::size_t k,
                                                          std::uint64_t rng_seed) {
    if (k > population)
        throw Error(ErrorKind::Invalid, "sample size exceeds population");
    std::vector<std::uint32_t> perm(population);
    for (std::size_t i = 0; i < population; ++i)
        perm[i] = static_cast<std::uint32_t>(i);
    std::mt19937_64 rng(rng_seed);
    for (std::size_t i = 0; i < k; ++i)
        std::swap(perm[i], perm[i + uniform_below(rng, population - i)]);
    perm.resize(k);
    return perm;
}

inline std::vector<StateVector> sample_uniform(const ReachableSet &r, std::size_t k,
                                               std::uint64_t rng_seed) {
    std::vector<StateVector> out;
    for (auto id : sample_indices(r.size(), k, rng_seed)) {
        auto s = r[id];
        out.emplace_back(s.begin(), s.end());
    }
    return out;
}

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Exact distance of every state to goal (backward BFS over the reversed edges).
inline std::vector<std::uint32_t> distances_to(const ReachableSet &r, const EdgeSet &e,
                                               std::span<const Symbol> goal) {
    auto g = r.states.find(goal);
    if (!g)
        throw Error(ErrorKind::NoSolution, "goal is not in the reachable set");
    const std::size_t n = r.size();
    std::vector<std::uint32_t> offset(n + 1, 0);
    for (const auto &edge : e.edges)
        ++offset[edge.to + 1];
    for (std::size_t i = 0; i < n; ++i)
        offset[i + 1] += offset[i];
    std::vector<std::uint32_t> pred(e.edges.size());
    std::vector<std::uint32_t> fill(offset.begin(), offset.end() - 1);
    for (const auto &edge : e.edges)
        pred[fill[edge.to]++] = edge.from;

    std::vector<std::uint32_t> dist(n, kUnreached);
    std::vector<std::uint32_t> queue;
    queue.reserve(n);
    dist[*g] = 0;
    queue.push_back(*g);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t v = queue[head];
        for (std::uint32_t k = offset[v]; k < offset[v + 1]; ++k) {
            const std::uint32_t u = pred[k];
            if (dist[u] == kUnreached) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    return dist;
}

inline double avg_distance(const ReachableSet &r, const EdgeSet &e, std::span<const Symbol> goal) {
    auto dist = distances_to(r, e, goal);
    std::uint64_t total = 0;
    for (auto v : dist) {
        if (v == kUnreached)
            throw Error(ErrorKind::NoSolution, "some reachable state cannot reach the goal");
        total += v;
    }
    return r.size() ? static_cast<double>(total) / static_cast<double>(r.size()) : 0.0;
}

inline double avg_distance(const Domain &d, const ReachableSet &r, std::span<const Symbol> goal) {
    return avg_distance(r, collect_edges(d, r), goal);
}

namespace io {

inline void put_u32(std::ostream &out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
}

inline void put_u64(std::ostream &out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

inline std::uint32_t get_u32(std::istream &in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char *>(b), 4))
        throw Error(ErrorKind::Invalid, "truncated binary file");
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
           std::uint32_t{b[3]} << 24;
}

inline std::uint64_t get_u64(std::istream &in) {
    std::uint64_t lo = get_u32(in);
    return lo | std::uint64_t{get_u32(in)} << 32;
}

inline void put_bytes(std::ostream &out, std::span<const Symbol> bytes) {
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

inline void get_bytes(std::istream &in, std::span<Symbol> bytes) {
    if (!in.read(reinterpret_cast<char *>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
        throw Error(ErrorKind::Invalid, "truncated binary file");
}

inline void expect_magic(std::istream &in, const char *magic, std::uint32_t version) {
    char m[4];
    if (!in.read(m, 4) || std::memcmp(m, magic, 4) != 0)
        throw Error(ErrorKind::Invalid, std::string("bad magic, expected ") + magic);
    if (get_u32(in) != version)
        throw Error(ErrorKind::Invalid, "unsupported file version");
}

} // namespace io

inline constexpr std::uint32_t kReachableFileVersion = 1;

// Layout: "SPRS", version, state_len, count, seed cells, depth[count], cells[count * len].
inline void save_reachable(std::ostream &out, const ReachableSet &r) {
    out.write("SPRS", 4);
    io::put_u32(out, kReachableFileVersion);
    io::put_u32(out, static_cast<std::uint32_t>(r.states.state_len()));
    io::put_u64(out, r.size());
    io::put_bytes(out, r.seed);
    for (auto v : r.depth)
        io::put_u32(out, v);
    io::put_bytes(out, r.states.cells());
}

inline ReachableSet load_reachable(std::istream &in) {
    io::expect_magic(in, "SPRS", kReachableFileVersion);
    ReachableSet r;
    const std::size_t len = io::get_u32(in);
    const std::uint64_t count = io::get_u64(in);
    r.seed.resize(len);
    io::get_bytes(in, r.seed);
    r.depth.resize(count);
    for (auto &v : r.depth)
        v = io::get_u32(in);
    r.states = StateArena(len);
    StateVector s(len);
    for (std::uint64_t k = 0; k < count; ++k) {
        io::get_bytes(in, s);
        if (!r.states.insert(s).second)
            throw Error(ErrorKind::Invalid, "duplicate state in reachable-set file");
    }
    return r;
}

// Layout: "SPRE", version, count, then (from, to, op) triples.
inline void save_edges(std::ostream &out, const EdgeSet &e) {
    out.write("SPRE", 4);
    io::put_u32(out, kReachableFileVersion);
    io::put_u64(out, e.size());
    for (const auto &edge : e.edges) {
        io::put_u32(out, edge.from);
        io::put_u32(out, edge.to);
        io::put_u32(out, edge.op);
    }
}

inline EdgeSet load_edges(std::istream &in) {
    io::expect_magic(in, "SPRE", kReachableFileVersion);
    EdgeSet e;
    e.edges.resize(io::get_u64(in));
    for (auto &edge : e.edges) {
        edge.from = io::get_u32(in);
        edge.to = io::get_u32(in);
        edge.op = io::get_u32(in);
    }
    return e;
}

} // namespace spurion
