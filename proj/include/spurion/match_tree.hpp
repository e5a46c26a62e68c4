#pragma once

#include "psvn.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace spurion {

// Decision tree over (position, symbol) equality constraints. Each indexed item
// lists the constant cells it requires; for_each_candidate visits exactly the items
// whose constraints all hold on a state. Items may carry further checks (variables)
// that the caller performs.
class MatchTree {
public:
    using Constraint = std::pair<std::uint32_t, Symbol>;

private:
    struct Node {
        std::int32_t position = -1;
        std::int32_t dont_care = -1;
        Symbol min_value = 0;
        std::vector<std::int32_t> children;
        std::vector<std::uint32_t> items;
    };
    std::vector<Node> nodes_;

    struct Entry {
        std::uint32_t item;
        std::uint32_t cursor;
    };

    std::int32_t build(std::vector<Entry> entries,
                       const std::vector<std::vector<Constraint>> &constraints) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
        std::vector<Entry> rest;
        std::uint32_t next_pos = UINT32_MAX;
        for (const auto &e : entries) {
            const auto &c = constraints[e.item];
            if (e.cursor == c.size()) {
                nodes_[id].items.push_back(e.item);
            } else {
                rest.push_back(e);
                next_pos = std::min(next_pos, c[e.cursor].first);
            }
        }
        if (rest.empty())
            return id;

        Symbol lo = 255, hi = 0;
        std::vector<Entry> dont_care;
        for (const auto &e : rest) {
            const auto &c = constraints[e.item][e.cursor];
            if (c.first == next_pos) {
                lo = std::min(lo, c.second);
                hi = std::max(hi, c.second);
            } else {
                dont_care.push_back(e);
            }
        }
        std::vector<std::vector<Entry>> buckets(static_cast<std::size_t>(hi - lo) + 1);
        for (const auto &e : rest) {
            const auto &c = constraints[e.item][e.cursor];
            if (c.first == next_pos)
                buckets[c.second - lo].push_back({e.item, e.cursor + 1});
        }
        std::vector<std::int32_t> children(buckets.size(), -1);
        for (std::size_t v = 0; v < buckets.size(); ++v)
            if (!buckets[v].empty())
                children[v] = build(std::move(buckets[v]), constraints);
        std::int32_t dc = dont_care.empty() ? -1 : build(std::move(dont_care), constraints);

        Node &node = nodes_[id];
        node.position = static_cast<std::int32_t>(next_pos);
        node.min_value = lo;
        node.children = std::move(children);
        node.dont_care = dc;
        return id;
    }

public:
    MatchTree() = default;

    // constraints[item] must be sorted by position with at most one entry per position.
    explicit MatchTree(const std::vector<std::vector<Constraint>> &constraints) {
        std::vector<Entry> all;
        all.reserve(constraints.size());
        for (std::uint32_t i = 0; i < constraints.size(); ++i)
            all.push_back({i, 0});
        build(std::move(all), constraints);
    }

    template <typename Visit>
    void for_each_candidate(std::span<const Symbol> s, Visit &&visit) const {
        if (nodes_.empty())
            return;
        std::int32_t stack[512];
        std::size_t top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const Node &node = nodes_[stack[--top]];
            for (auto item : node.items)
                visit(item);
            if (node.position < 0)
                continue;
            if (node.dont_care >= 0)
                stack[top++] = node.dont_care;
            const Symbol v = s[node.position];
            if (v >= node.min_value && v - node.min_value < static_cast<int>(node.children.size())) {
                std::int32_t child = node.children[v - node.min_value];
                if (child >= 0)
                    stack[top++] = child;
            }
            if (top + 2 >= 512)
                throw Error(ErrorKind::Capacity, "match tree traversal too deep");
        }
    }

    std::size_t num_nodes() const { return nodes_.size(); }
};

// Constant cells of the lhs: forward applicability constraints.
inline std::vector<MatchTree::Constraint> forward_constraints(const Operator &op) {
    std::vector<MatchTree::Constraint> out;
    for (std::uint32_t i = 0; i < op.lhs.size(); ++i)
        if (op.lhs[i].is_const())
            out.emplace_back(i, op.lhs[i].value);
    return out;
}

// Constant requirements on a successor state for it to have a pre-image under op.
inline std::vector<MatchTree::Constraint> backward_constraints(const Operator &op) {
    std::vector<MatchTree::Constraint> out;
    for (std::uint32_t i = 0; i < op.rhs.size(); ++i) {
        if (op.rhs[i].is_const())
            out.emplace_back(i, op.rhs[i].value);
        else if (op.rhs[i].is_underscore() && op.lhs[i].is_const())
            out.emplace_back(i, op.lhs[i].value);
    }
    return out;
}

// Successor/predecessor generation for a fixed domain.
class SuccessorGenerator {
    const Domain *domain_;
    MatchTree forward_;
    MatchTree backward_;

    template <typename F>
    static MatchTree make(const Domain &d, F &&extract) {
        std::vector<std::vector<MatchTree::Constraint>> cs;
        cs.reserve(d.operators.size());
        for (const auto &op : d.operators)
            cs.push_back(extract(op));
        return MatchTree(cs);
    }

public:
    explicit SuccessorGenerator(const Domain &d)
        : domain_(&d), forward_(make(d, forward_constraints)),
          backward_(make(d, backward_constraints)) {}

    const Domain &domain() const { return *domain_; }

    // Operator ids whose lhs constants match s (unsorted).
    template <typename Visit>
    void for_each_forward_candidate(std::span<const Symbol> s, Visit &&visit) const {
        forward_.for_each_candidate(s, visit);
    }

    // Visits (operator id, successor) for every applicable operator, in declaration order.
    template <typename Visit>
    void for_each_successor(std::span<const Symbol> s, std::vector<std::uint32_t> &ids,
                            StateVector &buffer, Visit &&visit) const {
        ids.clear();
        forward_.for_each_candidate(s, [&](std::uint32_t id) { ids.push_back(id); });
        std::sort(ids.begin(), ids.end());
        buffer.resize(s.size());
        for (auto id : ids)
            if (apply_into(domain_->operators[id], s, buffer))
                visit(id, std::span<const Symbol>(buffer));
    }

    // Visits (operator id, predecessor) for every pre-image under every operator.
    template <typename Visit>
    void for_each_predecessor(std::span<const Symbol> s, std::vector<std::uint32_t> &ids,
                              PredecessorScratch &scratch, Visit &&visit) const {
        ids.clear();
        backward_.for_each_candidate(s, [&](std::uint32_t id) { ids.push_back(id); });
        std::sort(ids.begin(), ids.end());
        for (auto id : ids)
            spurion::for_each_predecessor(*domain_, domain_->operators[id], s, scratch,
                                          [&](std::span<const Symbol> p) { visit(id, p); });
    }
};

} // namespace spurion
