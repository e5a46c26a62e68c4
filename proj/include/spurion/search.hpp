#pragma once

#include "error.hpp"
#include "match_tree.hpp"
#include "psvn.hpp"
#include "reachability.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace spurion {

struct SearchResult {
    std::uint32_t solution_length = 0;
    std::uint64_t nodes_expanded = 0;
    std::uint64_t nodes_generated = 0;
    std::uint32_t iterations = 0;
};

inline constexpr std::uint64_t kDefaultNodeLimit = 2'000'000'000ULL;

struct IdaOptions {
    // Skip a child equal to the parent of the node being expanded.
    bool parent_pruning = false;
    std::uint64_t node_limit = kDefaultNodeLimit;
};

namespace detail {

template <typename Heuristic>
class IdaStar {
    const SuccessorGenerator &gen_;
    const Heuristic &h_;
    StateVector goal_;
    std::size_t n_;
    IdaOptions opt_;
    // One state and child list per depth; children are stored back to back.
    std::vector<StateVector> stack_;
    std::vector<std::vector<Symbol>> children_;
    std::vector<std::uint32_t> ids_;
    SearchResult result_;

    static constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

    // Returns g when the goal was found, otherwise the smallest f above bound.
    std::uint32_t dfs(std::size_t depth, std::uint32_t g, std::uint32_t bound, bool &found) {
        if (stack_.size() <= depth + 1) {
            stack_.emplace_back(n_);
            children_.emplace_back();
        }
        const std::uint32_t hv = h_(stack_[depth]);
        if (hv == kInf)
            return kInf;
        const std::uint32_t f = g + hv;
        if (f > bound)
            return f;
        if (std::equal(goal_.begin(), goal_.end(), stack_[depth].begin())) {
            found = true;
            return g;
        }
        if (++result_.nodes_expanded > opt_.node_limit)
            throw Error(ErrorKind::Capacity, "IDA* node limit exceeded");

        ids_.clear();
        gen_.for_each_forward_candidate(stack_[depth], [&](std::uint32_t id) { ids_.push_back(id); });
        std::sort(ids_.begin(), ids_.end());
        const auto &ops = gen_.domain().operators;
        auto &kids = children_[depth];
        kids.clear();
        StateVector &buffer = stack_[depth + 1];
        for (auto id : ids_) {
            if (!apply_into(ops[id], stack_[depth], buffer))
                continue;
            if (opt_.parent_pruning && depth > 0 && buffer == stack_[depth - 1])
                continue;
            kids.insert(kids.end(), buffer.begin(), buffer.end());
        }
        const std::size_t count = n_ ? kids.size() / n_ : 0;
        result_.nodes_generated += count;

        std::uint32_t next = kInf;
        for (std::size_t k = 0; k < count; ++k) {
            // Deeper calls may grow stack_ and children_, so index instead of holding references.
            std::copy_n(children_[depth].begin() + static_cast<std::ptrdiff_t>(k * n_), n_,
                        stack_[depth + 1].begin());
            std::uint32_t t = dfs(depth + 1, g + 1, bound, found);
            if (found)
                return t;
            next = std::min(next, t);
        }
        return next;
    }

public:
    IdaStar(const SuccessorGenerator &gen, const Heuristic &h, std::span<const Symbol> goal,
            IdaOptions opt)
        : gen_(gen), h_(h), goal_(goal.begin(), goal.end()), n_(goal.size()), opt_(opt) {}

    SearchResult run(std::span<const Symbol> start) {
        stack_.assign(1, StateVector(start.begin(), start.end()));
        children_.assign(1, {});
        result_ = {};
        std::uint32_t bound = h_(start);
        if (bound == kInf)
            throw Error(ErrorKind::NoSolution, "start state has infinite heuristic");
        while (true) {
            ++result_.iterations;
            bool found = false;
            std::uint32_t t = dfs(0, 0, bound, found);
            if (found) {
                result_.solution_length = t;
                break;
            }
            if (t == kInf)
                throw Error(ErrorKind::NoSolution, "goal unreachable from start");
            bound = t;
        }
        return result_;
    }
};

} // namespace detail

// Plain IDA*: unit costs, children in declaration order, no transposition table.
// A node counts as expanded when its children are generated; goal nodes are not expanded.
template <typename Heuristic>
SearchResult ida_star(const SuccessorGenerator &gen, std::span<const Symbol> start,
                      const Heuristic &h, IdaOptions opt = {}) {
    detail::IdaStar<Heuristic> search(gen, h, gen.domain().goal, opt);
    return search.run(start);
}

template <typename Heuristic>
SearchResult ida_star(const Domain &d, std::span<const Symbol> start, const Heuristic &h,
                      IdaOptions opt = {}) {
    SuccessorGenerator gen(d);
    return ida_star(gen, start, h, opt);
}

// Exact unit-cost distance by forward breadth-first search.
inline std::uint32_t bfs_oracle(const Domain &d, std::span<const Symbol> start,
                                std::span<const Symbol> goal,
                                std::size_t cap = kDefaultStateCap) {
    if (std::equal(start.begin(), start.end(), goal.begin(), goal.end()))
        return 0;
    StateArena seen(d.state_len);
    std::vector<std::uint32_t> depth{0};
    seen.insert(start);
    SuccessorGenerator gen(d);
    std::vector<std::uint32_t> ids;
    StateVector buffer, current;
    for (std::size_t k = 0; k < seen.size(); ++k) {
        auto s = seen[k];
        current.assign(s.begin(), s.end());
        bool hit = false;
        gen.for_each_successor(current, ids, buffer, [&](std::uint32_t, std::span<const Symbol> t) {
            if (hit || !seen.insert(t).second)
                return;
            depth.push_back(depth[k] + 1);
            if (std::equal(t.begin(), t.end(), goal.begin(), goal.end()))
                hit = true;
        });
        if (hit)
            return depth.back();
        if (seen.size() > cap)
            throw Error(ErrorKind::Capacity, "BFS oracle exceeds state cap");
    }
    throw Error(ErrorKind::NoSolution, "goal unreachable from start");
}

} // namespace spurion
