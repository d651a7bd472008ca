#pragma once

#include "wata/automaton.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wata {

// A letter is a set of (state, interval) pairs; pair (q, I_d) is bit q*d_max + (d-1).
using Letter = std::uint64_t;

struct PairSpace {
    int num_states = 1;
    int d_max = 1;

    PairSpace() = default;
    PairSpace(int n, int d) : num_states(n), d_max(d) {
        if (n * d > 64)
            throw ResourceError("abstraction supports at most 64 (state, interval) pairs; got " +
                                std::to_string(n * d));
    }
    explicit PairSpace(const Automaton& a) : PairSpace(a.num_states(), a.d_max) {}

    int num_pairs() const { return num_states * d_max; }
    Letter all_pairs() const {
        return num_pairs() == 64 ? ~Letter{0} : ((Letter{1} << num_pairs()) - 1);
    }
    Letter pair(StateId q, int d) const { return Letter{1} << (q * d_max + d - 1); }
    StateId state_of(int bit) const { return bit / d_max; }
    int interval_of(int bit) const { return bit % d_max + 1; }

    // Places every state of s at interval I_d.
    Letter spread(StateSet s, int d) const {
        Letter out = 0;
        for_each_bit(s, [&](int q) { out |= pair(q, d); });
        return out;
    }
    // Pairs of l sitting at I_d, as a state set.
    StateSet at_interval(Letter l, int d) const {
        StateSet s = 0;
        for_each_bit(l, [&](int b) {
            if (interval_of(b) == d) s |= StateSet{1} << state_of(b);
        });
        return s;
    }
    StateSet states_of(Letter l) const {
        StateSet s = 0;
        for_each_bit(l, [&](int b) { s |= StateSet{1} << state_of(b); });
        return s;
    }
};

struct Configuration {
    std::vector<Letter> word;
    StateSet inf = 0;

    int size() const {
        int n = popcount(inf);
        for (Letter l : word) n += popcount(l);
        return n;
    }
    bool empty() const { return word.empty() && inf == 0; }
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const {
        std::size_t h = std::hash<std::uint64_t>{}(c.inf);
        for (Letter l : c.word) h = hash_mix(h, std::hash<std::uint64_t>{}(l));
        return hash_mix(h, c.word.size());
    }
};

inline StateSet states_in(const PairSpace& ps, const Configuration& c) {
    StateSet s = c.inf;
    for (Letter l : c.word) s |= ps.states_of(l);
    return s;
}

inline bool qplus_only(const PairSpace& ps, const Configuration& c, StateSet accepting) {
    return subset_of(states_in(ps, c), accepting);
}

inline std::string letter_text(const Automaton& a, const PairSpace& ps, Letter l) {
    std::string s = "{";
    bool first = true;
    for_each_bit(l, [&](int b) {
        if (!first) s += ",";
        first = false;
        s += a.states[ps.state_of(b)].name + ":I" + std::to_string(ps.interval_of(b));
    });
    return s + "}";
}

inline std::string state_set_text(const Automaton& a, StateSet s) {
    std::string out = "{";
    bool first = true;
    for_each_bit(s, [&](int q) {
        if (!first) out += ",";
        first = false;
        out += a.states[q].name;
    });
    return out + "}";
}

// Debug dump, e.g. "[{q:I1,q2:I2} {q:I1}] inf={p}".
inline std::string dump(const Automaton& a, const Configuration& c) {
    PairSpace ps(a);
    std::string s = "[";
    for (std::size_t i = 0; i < c.word.size(); ++i) {
        if (i) s += " ";
        s += letter_text(a, ps, c.word[i]);
    }
    return s + "] inf=" + state_set_text(a, c.inf);
}

// Inverse of dump.
inline Configuration parse_configuration(const Automaton& a, std::string_view text) {
    PairSpace ps(a);
    detail::Cursor c{text, 0, 1, 1};
    Configuration cfg;
    c.expect("[");
    while (!c.eat("]")) {
        c.expect("{");
        Letter l = 0;
        while (!c.eat("}")) {
            if (l) c.expect(",");
            std::size_t at = c.pos;
            std::string name;
            c.skip_ws();
            while (c.pos < text.size() && text[c.pos] != ':' && text[c.pos] != ',' &&
                   text[c.pos] != '}' && !std::isspace(static_cast<unsigned char>(text[c.pos])))
                ++c.pos;
            name = std::string(text.substr(at, c.pos - at));
            while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front())))
                name.erase(name.begin());
            auto q = a.state_index(name);
            if (!q) {
                c.pos = at;
                c.fail("unknown state '" + name + "'");
            }
            c.expect(":");
            c.expect("I");
            long long d = c.integer();
            if (d < 1 || d > a.d_max) c.fail("interval index out of range");
            l |= ps.pair(*q, static_cast<int>(d));
        }
        if (!l) c.fail("empty letter");
        cfg.word.push_back(l);
    }
    c.expect("inf");
    c.expect("=");
    c.expect("{");
    bool first = true;
    while (!c.eat("}")) {
        if (!first) c.expect(",");
        first = false;
        std::size_t at = c.pos;
        std::string name = c.ident();
        auto q = a.state_index(name);
        if (!q) {
            c.pos = at;
            c.fail("unknown state '" + name + "'");
        }
        cfg.inf |= StateSet{1} << *q;
    }
    if (!c.at_end()) c.fail("unexpected text after configuration");
    return cfg;
}

}  // namespace wata
