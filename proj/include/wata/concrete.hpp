#pragma once

#include "wata/automaton.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wata {

using ConcretePair = std::pair<StateId, Rational>;
using ConcreteConfig = std::set<ConcretePair>;

struct TimedEvent {
    ActionId action;
    Rational time;
};
using TimedWord = std::vector<TimedEvent>;

inline Rational parse_rational(std::string_view s) {
    auto slash = s.find('/');
    auto num = [](std::string_view t) -> std::int64_t {
        if (t.empty()) throw std::invalid_argument("empty number");
        std::size_t used = 0;
        long long v = std::stoll(std::string(t), &used);
        if (used != t.size()) throw std::invalid_argument("bad number '" + std::string(t) + "'");
        return v;
    };
    if (slash == std::string_view::npos) return Rational(num(s));
    std::int64_t d = num(s.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator");
    return Rational(num(s.substr(0, slash)), d);
}

inline std::string rational_text(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Parses "a@1/2 b@3/4". Timestamps must be positive and strictly increasing.
inline TimedWord parse_timed_word(std::string_view text, const std::vector<std::string>& alphabet) {
    TimedWord w;
    std::size_t pos = 0;
    int column = 1;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) break;
        column = static_cast<int>(pos) + 1;
        std::size_t end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
        std::string_view tok = text.substr(pos, end - pos);
        auto at = tok.find('@');
        if (at == std::string_view::npos) throw ParseError(1, column, "expected action@time");
        std::string name(tok.substr(0, at));
        auto it = std::find(alphabet.begin(), alphabet.end(), name);
        if (it == alphabet.end()) throw ParseError(1, column, "unknown letter '" + name + "'");
        Rational t;
        try {
            t = parse_rational(tok.substr(at + 1));
        } catch (const std::exception& e) {
            throw ParseError(1, column + static_cast<int>(at) + 1, e.what());
        }
        if (t <= Rational(0)) throw ParseError(1, column, "timestamps must be positive");
        if (!w.empty() && t <= w.back().time)
            throw ParseError(1, column, "timestamps must be strictly increasing");
        w.push_back({static_cast<ActionId>(it - alphabet.begin()), t});
        pos = end;
    }
    return w;
}

inline ConcreteConfig elapse(const ConcreteConfig& p, const Rational& t) {
    if (t <= Rational(0)) throw PreconditionError("elapse needs a positive delay");
    ConcreteConfig out;
    for (const auto& [q, v] : p) out.insert({q, v + t});
    return out;
}

namespace detail {

// Per-pair alternatives: each alternative is the set of pairs it creates.
// Top atoms create nothing; disjuncts with a bot atom are unusable.
inline std::vector<std::vector<ConcretePair>> pair_alternatives(const Automaton& a, StateId q,
                                                                const Rational& v, ActionId act) {
    std::set<std::vector<ConcretePair>> alts;
    for (int ri : a.enabled_at(q, act, v)) {
        for (const auto& d : a.rules[ri].formula) {
            std::vector<ConcretePair> made;
            bool dead = false;
            for (const auto& at : d) {
                if (at.kind == Atom::Kind::bot) dead = true;
                if (at.kind != Atom::Kind::state) continue;
                made.push_back({at.state, at.reset ? Rational(0) : v});
            }
            if (dead) continue;
            std::sort(made.begin(), made.end());
            made.erase(std::unique(made.begin(), made.end()), made.end());
            alts.insert(std::move(made));
        }
    }
    return {alts.begin(), alts.end()};
}

}  // namespace detail

// All S(A) successors of p on `act`; empty iff some pair is blocked.
inline std::set<ConcreteConfig> letter_successors(const Automaton& a, const ConcreteConfig& p,
                                                  ActionId act) {
    std::vector<std::vector<std::vector<ConcretePair>>> alts;
    for (const auto& [q, v] : p) {
        auto al = detail::pair_alternatives(a, q, v, act);
        if (al.empty()) return {};
        alts.push_back(std::move(al));
    }
    std::set<ConcreteConfig> out;
    std::vector<std::size_t> pick(alts.size(), 0);
    while (true) {
        ConcreteConfig c;
        for (std::size_t i = 0; i < alts.size(); ++i)
            c.insert(alts[i][pick[i]].begin(), alts[i][pick[i]].end());
        out.insert(std::move(c));
        std::size_t i = 0;
        while (i < alts.size() && ++pick[i] == alts[i].size()) pick[i++] = 0;
        if (i == alts.size()) break;
    }
    return out;
}

struct ReplayResult {
    std::set<ConcreteConfig> configs;
    bool truncated = false;
};

inline constexpr std::size_t kDefaultBranchCap = 100000;

inline ReplayResult replay(const Automaton& a, const TimedWord& w,
                           std::size_t branch_cap = kDefaultBranchCap) {
    ReplayResult r;
    r.configs.insert(ConcreteConfig{{a.initial, Rational(0)}});
    Rational now(0);
    for (const auto& ev : w) {
        std::set<ConcreteConfig> next;
        for (const auto& p : r.configs) {
            for (auto& s : letter_successors(a, elapse(p, ev.time - now), ev.action)) {
                if (next.size() >= branch_cap) {
                    r.truncated = true;
                    break;
                }
                next.insert(s);
            }
        }
        r.configs = std::move(next);
        now = ev.time;
    }
    return r;
}

struct BranchTrace {
    std::vector<ConcreteConfig> path;  // S(A) sets after 0..n events
    std::vector<int> running_min;      // minimum rank seen up to each step; -1 for empty sets
};

inline int min_rank_of(const Automaton& a, const ConcreteConfig& p) {
    int m = -1;
    for (const auto& [q, v] : p) m = (m < 0) ? a.rank(q) : std::min(m, a.rank(q));
    return m;
}

// One entry per surviving branch of the replay.
inline std::vector<BranchTrace> prefix_rank_trace(const Automaton& a, const TimedWord& w,
                                                  std::size_t branch_cap = kDefaultBranchCap) {
    ConcreteConfig start{{a.initial, Rational(0)}};
    std::vector<BranchTrace> live{{{start}, {min_rank_of(a, start)}}};
    Rational now(0);
    for (const auto& ev : w) {
        std::vector<BranchTrace> next;
        for (const auto& b : live) {
            for (const auto& s : letter_successors(a, elapse(b.path.back(), ev.time - now),
                                                   ev.action)) {
                if (next.size() >= branch_cap) break;
                BranchTrace nb = b;
                int m = min_rank_of(a, s);
                int prev = nb.running_min.back();
                nb.running_min.push_back(prev < 0 ? m : (m < 0 ? prev : std::min(prev, m)));
                nb.path.push_back(s);
                next.push_back(std::move(nb));
            }
        }
        live = std::move(next);
        now = ev.time;
    }
    return live;
}

inline std::string concrete_text(const Automaton& a, const ConcreteConfig& p) {
    std::string s = "{";
    bool first = true;
    for (const auto& [q, v] : p) {
        if (!first) s += ",";
        first = false;
        s += "(" + a.states[q].name + "," + rational_text(v) + ")";
    }
    return s + "}";
}

}  // namespace wata
