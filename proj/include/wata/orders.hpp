#pragma once

#include "wata/config.hpp"

#include <algorithm>
#include <vector>

namespace wata {

// Greedy leftmost embedding of word u into word w with letter inclusion.
inline bool embeds(const Letter* u, std::size_t nu, const Letter* w, std::size_t nw) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < nu; ++i) {
        while (j < nw && !subset_of(u[i], w[j])) ++j;
        if (j == nw) return false;
        ++j;
    }
    return true;
}

// c1 ⪯ c2
inline bool leq(const Configuration& c1, const Configuration& c2) {
    if (!subset_of(c1.inf, c2.inf)) return false;
    if (c1.word.size() > c2.word.size()) return false;
    return embeds(c1.word.data(), c1.word.size(), c2.word.data(), c2.word.size());
}

// c1 ⪯_r c2: c1 has a non-empty word, c1 ⪯ c2, and the last letters are included.
// Equivalently the last letter of c1 may be mapped onto the last letter of c2.
inline bool leq_r(const Configuration& c1, const Configuration& c2) {
    if (c1.word.empty() || c2.word.empty()) return false;
    if (!subset_of(c1.inf, c2.inf)) return false;
    if (!subset_of(c1.word.back(), c2.word.back())) return false;
    return embeds(c1.word.data(), c1.word.size() - 1, c2.word.data(), c2.word.size() - 1);
}

enum class Order { leq, leq_r };

inline bool order_leq(Order o, const Configuration& c1, const Configuration& c2) {
    return o == Order::leq ? leq(c1, c2) : leq_r(c1, c2);
}

// Upward-closed set given by an antichain of minimal elements.
// For ⪯_r, configurations with an empty word are never above a generator; the flag
// `empty_word_members` adds all of them to the set explicitly.
class UpSet {
public:
    explicit UpSet(Order o = Order::leq) : order_(o) {}

    Order order() const { return order_; }
    const std::vector<Configuration>& generators() const { return gens_; }
    bool empty_word_members() const { return empty_word_members_; }
    void set_empty_word_members(bool v) { empty_word_members_ = v; }
    std::size_t size() const { return gens_.size(); }

    bool contains(const Configuration& c) const {
        if (empty_word_members_ && c.word.empty()) return true;
        const int sz = c.size();
        for (const auto& g : gens_)
            if (g.size() <= sz && order_leq(order_, g, c)) return true;
        return false;
    }

    // Returns false when c was already covered.
    bool insert(const Configuration& c) {
        if (order_ == Order::leq_r && c.word.empty()) {
            bool changed = !empty_word_members_;
            empty_word_members_ = true;
            return changed;
        }
        if (contains_generator_below(c)) return false;
        std::erase_if(gens_, [&](const Configuration& g) { return order_leq(order_, c, g); });
        gens_.push_back(c);
        return true;
    }

    // Generators sorted for deterministic output.
    std::vector<Configuration> sorted_generators() const {
        auto v = gens_;
        std::sort(v.begin(), v.end(), [](const Configuration& x, const Configuration& y) {
            if (x.size() != y.size()) return x.size() < y.size();
            return x < y;
        });
        return v;
    }

private:
    bool contains_generator_below(const Configuration& c) const {
        const int sz = c.size();
        for (const auto& g : gens_)
            if (g.size() <= sz && order_leq(order_, g, c)) return true;
        return false;
    }

    Order order_;
    std::vector<Configuration> gens_;
    bool empty_word_members_ = false;
};

inline UpSet antichain_insert(UpSet s, const Configuration& c) {
    s.insert(c);
    return s;
}

// s1 ⊆ s2 as upward-closed sets.
inline bool upset_subset(const UpSet& s1, const UpSet& s2) {
    if (s1.empty_word_members() && !s2.empty_word_members()) return false;
    for (const auto& g : s1.generators())
        if (!s2.contains(g)) return false;
    return true;
}

inline bool upset_equal(const UpSet& s1, const UpSet& s2) {
    if (s1.order() != s2.order())
        throw PreconditionError("comparing up-sets of different orders");
    return upset_subset(s1, s2) && upset_subset(s2, s1);
}

}  // namespace wata
