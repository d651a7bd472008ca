#pragma once

#include "wata/orders.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

namespace wata {

// Work counter shared by the expensive searches.
struct Budget {
    std::uint64_t limit = UINT64_MAX;
    std::uint64_t used = 0;

    void charge(std::uint64_t n = 1) {
        used += n;
        if (used > limit)
            throw ResourceError("work budget of " + std::to_string(limit) + " units exhausted");
    }
};

// Summary of a configuration word fed letter by letter, sufficient to decide membership
// in an up-set for a fixed inf part.
struct Profile {
    std::vector<std::uint8_t> match;  // greedy match length per relevant generator
    Letter last = 0;                  // current last letter (⪯_r only), 0 before any letter
    bool top = false;                 // ⪯ only: already accepted; stays accepted

    friend auto operator<=>(const Profile&, const Profile&) = default;
};

class ProfileTracker {
public:
    ProfileTracker(const UpSet& target, StateSet inf) : order_(target.order()) {
        empty_word_ok_ = target.empty_word_members();
        for (const auto& g : target.generators()) {
            if (!subset_of(g.inf, inf)) continue;
            if (order_ == Order::leq && g.word.empty()) always_ = true;
            gens_.push_back(g.word);
        }
    }

    Order order() const { return order_; }

    Profile start() const {
        Profile p;
        if (always_) {
            p.top = true;
            return p;
        }
        p.match.assign(gens_.size(), 0);
        return p;
    }

    Profile feed(const Profile& p, Letter mu) const {
        if (p.top) return p;
        Profile r = p;
        if (order_ == Order::leq) {
            for (std::size_t i = 0; i < gens_.size(); ++i) {
                auto& m = r.match[i];
                if (m < gens_[i].size() && subset_of(gens_[i][m], mu)) ++m;
                if (m == gens_[i].size()) {
                    Profile t;
                    t.top = true;
                    return t;
                }
            }
            return r;
        }
        if (r.last) advance_prefix(r, r.last);
        r.last = mu;
        return r;
    }

    bool accepting(const Profile& p) const {
        if (p.top) return true;
        if (order_ == Order::leq) return false;
        if (!p.last) return empty_word_ok_;
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (p.match[i] + 1u == gens_[i].size() && subset_of(gens_[i].back(), p.last))
                return true;
        return false;
    }

private:
    void advance_prefix(Profile& r, Letter mu) const {
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            auto& m = r.match[i];
            if (m + 1u < gens_[i].size() && subset_of(gens_[i][m], mu)) ++m;
        }
    }

    Order order_;
    bool empty_word_ok_ = false;
    bool always_ = false;
    std::vector<std::vector<Letter>> gens_;
};

// Number of Moore equivalence classes of a complete DFA.
inline int moore_classes(const std::vector<bool>& accepting,
                         const std::vector<std::vector<int>>& trans) {
    const int n = static_cast<int>(accepting.size());
    if (n == 0) return 0;
    std::vector<int> cls(n);
    for (int i = 0; i < n; ++i) cls[i] = accepting[i] ? 1 : 0;
    int count = 0;
    while (true) {
        std::map<std::vector<int>, int> sig;
        std::vector<int> next(n);
        for (int i = 0; i < n; ++i) {
            std::vector<int> s;
            s.reserve(trans[i].size() + 1);
            s.push_back(cls[i]);
            for (int t : trans[i]) s.push_back(cls[t]);
            auto [it, ins] = sig.try_emplace(std::move(s), static_cast<int>(sig.size()));
            next[i] = it->second;
        }
        int c = static_cast<int>(sig.size());
        cls = std::move(next);
        if (c == count) break;
        count = c;
    }
    return count;
}

}  // namespace wata
