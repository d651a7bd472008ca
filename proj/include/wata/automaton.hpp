#pragma once

#include "wata/common.hpp"
#include "wata/region.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace wata {

inline constexpr const char* kTopName = "q_top";
inline constexpr const char* kBotName = "q_bot";

enum class Cmp { eq, ne, lt, le, gt, ge };

struct Constraint {
    Cmp cmp;
    int constant;

    bool holds(const Rational& v) const {
        Rational c(constant);
        switch (cmp) {
            case Cmp::eq: return v == c;
            case Cmp::ne: return v != c;
            case Cmp::lt: return v < c;
            case Cmp::le: return v <= c;
            case Cmp::gt: return v > c;
            case Cmp::ge: return v >= c;
        }
        return false;
    }
    friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

inline const char* cmp_text(Cmp c) {
    switch (c) {
        case Cmp::eq: return "=";
        case Cmp::ne: return "!=";
        case Cmp::lt: return "<";
        case Cmp::le: return "<=";
        case Cmp::gt: return ">";
        case Cmp::ge: return ">=";
    }
    return "?";
}

struct Guard {
    std::vector<Constraint> conjuncts;  // empty means true

    bool holds(const Rational& v) const {
        return std::all_of(conjuncts.begin(), conjuncts.end(),
                           [&](const Constraint& c) { return c.holds(v); });
    }
    int max_constant() const {
        int m = 0;
        for (const auto& c : conjuncts) m = std::max(m, c.constant);
        return m;
    }
    std::string text() const {
        if (conjuncts.empty()) return "true";
        std::string s;
        for (std::size_t i = 0; i < conjuncts.size(); ++i) {
            if (i) s += " & ";
            s += "x";
            s += cmp_text(conjuncts[i].cmp);
            s += std::to_string(conjuncts[i].constant);
        }
        return s;
    }
    friend auto operator<=>(const Guard&, const Guard&) = default;
};

// True iff every valuation of r satisfies g. Regions never straddle an integer,
// so evaluating at one sample point decides it.
inline bool guard_sat_region(const Guard& g, Region r, int d_max) {
    if (g.max_constant() > d_max)
        throw PreconditionError("guard constant " + std::to_string(g.max_constant()) +
                                " exceeds d_max " + std::to_string(d_max));
    return g.holds(r.sample(d_max));
}

struct Atom {
    enum class Kind { state, top, bot };
    Kind kind = Kind::state;
    StateId state = -1;
    bool reset = false;

    static Atom of(StateId q, bool reset) { return Atom{Kind::state, q, reset}; }
    static Atom top() { return Atom{Kind::top, -1, false}; }
    static Atom bot() { return Atom{Kind::bot, -1, false}; }
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

using Disjunct = std::vector<Atom>;  // sorted, duplicate free

struct TransitionRule {
    StateId source = 0;
    ActionId letter = 0;
    Guard guard;
    std::vector<Disjunct> formula;  // DNF; empty list is false
    friend auto operator<=>(const TransitionRule&, const TransitionRule&) = default;
};

struct State {
    std::string name;
    int rank = 0;
    friend auto operator<=>(const State&, const State&) = default;
};

class Automaton {
public:
    std::vector<State> states;
    std::vector<std::string> alphabet;
    StateId initial = 0;
    std::vector<TransitionRule> rules;
    int d_max = 1;

    Automaton() = default;
    Automaton(std::vector<State> s, std::vector<std::string> alpha, StateId init,
              std::vector<TransitionRule> r, int dmax)
        : states(std::move(s)), alphabet(std::move(alpha)), initial(init), rules(std::move(r)),
          d_max(dmax) {
        finalize();
    }

    int num_states() const { return static_cast<int>(states.size()); }
    int num_letters() const { return static_cast<int>(alphabet.size()); }
    int rank(StateId q) const { return states[q].rank; }

    std::optional<StateId> state_index(std::string_view name) const {
        for (int i = 0; i < num_states(); ++i)
            if (states[i].name == name) return i;
        return std::nullopt;
    }
    std::optional<ActionId> letter_index(std::string_view name) const {
        for (int i = 0; i < num_letters(); ++i)
            if (alphabet[i] == name) return i;
        return std::nullopt;
    }

    // Indices into `rules` for a (state, letter) pair.
    const std::vector<int>& rules_for(StateId q, ActionId a) const {
        return index_[static_cast<std::size_t>(q) * alphabet.size() + a];
    }

    // Rules enabled on a region for (q,a); at most one after normalization.
    std::vector<int> enabled(StateId q, ActionId a, Region r) const {
        std::vector<int> out;
        for (int i : rules_for(q, a))
            if (rules[i].guard.holds(r.sample(d_max))) out.push_back(i);
        return out;
    }
    std::vector<int> enabled_at(StateId q, ActionId a, const Rational& v) const {
        std::vector<int> out;
        for (int i : rules_for(q, a))
            if (rules[i].guard.holds(v)) out.push_back(i);
        return out;
    }

    StateSet accepting_mask() const {
        StateSet m = 0;
        for (int i = 0; i < num_states(); ++i)
            if (states[i].rank == 0) m |= StateSet{1} << i;
        return m;
    }

    void finalize() {
        if (states.empty()) throw PreconditionError("automaton has no states");
        if (initial < 0 || initial >= num_states()) throw PreconditionError("bad initial state");
        int m = 1;
        for (const auto& r : rules) m = std::max(m, r.guard.max_constant());
        if (d_max < m) d_max = m;
        index_.assign(states.size() * alphabet.size(), {});
        for (int i = 0; i < static_cast<int>(rules.size()); ++i) {
            const auto& r = rules[i];
            if (r.source < 0 || r.source >= num_states() || r.letter < 0 ||
                r.letter >= num_letters())
                throw PreconditionError("rule refers to unknown state or letter");
            index_[static_cast<std::size_t>(r.source) * alphabet.size() + r.letter].push_back(i);
        }
    }

    friend bool operator==(const Automaton& x, const Automaton& y) {
        return x.states == y.states && x.alphabet == y.alphabet && x.initial == y.initial &&
               x.rules == y.rules && x.d_max == y.d_max;
    }

private:
    std::vector<std::vector<int>> index_;
};

// ---------------------------------------------------------------- parsing

namespace detail {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;
    int line = 1;
    int col0 = 1;  // column of s[0]

    int col() const { return col0 + static_cast<int>(pos); }
    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= s.size();
    }
    bool eat(std::string_view tok) {
        skip_ws();
        if (s.substr(pos, tok.size()) == tok) {
            pos += tok.size();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col(), msg); }
    void expect(std::string_view tok) {
        if (!eat(tok)) fail("expected '" + std::string(tok) + "'");
    }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '\'' ||
               c == '.';
    }
    std::string ident() {
        skip_ws();
        std::size_t b = pos;
        while (pos < s.size() && ident_char(s[pos])) ++pos;
        if (b == pos) fail("expected identifier");
        return std::string(s.substr(b, pos - b));
    }
    long long integer() {
        skip_ws();
        bool neg = false;
        if (pos < s.size() && s[pos] == '-') {
            neg = true;
            ++pos;
        }
        std::size_t b = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (b == pos) fail("expected integer");
        if (neg) {
            pos = b - 1;
            fail("negative constant");
        }
        return std::stoll(std::string(s.substr(b, pos - b)));
    }
};

inline Cmp parse_cmp(Cursor& c) {
    if (c.eat("<=")) return Cmp::le;
    if (c.eat(">=")) return Cmp::ge;
    if (c.eat("!=")) return Cmp::ne;
    if (c.eat("<")) return Cmp::lt;
    if (c.eat(">")) return Cmp::gt;
    if (c.eat("=")) return Cmp::eq;
    c.fail("expected comparison operator");
}

inline Guard parse_guard(Cursor& c) {
    Guard g;
    c.skip_ws();
    if (c.eat("true")) return g;
    do {
        c.expect("x");
        Cmp op = parse_cmp(c);
        long long k = c.integer();
        g.conjuncts.push_back({op, static_cast<int>(k)});
    } while (c.eat("&"));
    return g;
}

template <class Lookup>
std::vector<Disjunct> parse_formula_dnf(Cursor& c, Lookup&& lookup) {
    std::vector<Disjunct> dnf;
    do {
        Disjunct d;
        do {
            c.skip_ws();
            if (c.eat("(")) {
                std::size_t at = c.pos;
                std::string name = c.ident();
                auto q = lookup(name);
                if (!q) {
                    c.pos = at;
                    c.fail("unknown state '" + name + "'");
                }
                c.expect(",");
                bool reset;
                if (c.eat("nop"))
                    reset = false;
                else if (c.eat("reset"))
                    reset = true;
                else
                    c.fail("expected 'nop' or 'reset'");
                c.expect(")");
                d.push_back(Atom::of(*q, reset));
            } else if (c.eat("true")) {
                d.push_back(Atom::top());
            } else if (c.eat("false")) {
                d.push_back(Atom::bot());
            } else {
                c.fail("expected atom");
            }
        } while (c.eat("&"));
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        dnf.push_back(std::move(d));
    } while (c.eat("|"));
    return dnf;
}

}  // namespace detail

struct ParseOptions {
    bool allow_reserved_names = false;
};

inline Automaton parse_automaton(std::string_view text, ParseOptions opt = {}) {
    std::vector<State> states;
    std::vector<std::string> alphabet;
    std::optional<StateId> initial;
    struct PendingRule {
        int line;
        std::string line_text;
        std::size_t start;
    };
    std::vector<PendingRule> pending;

    auto find_state = [&](const std::string& n) -> std::optional<StateId> {
        for (int i = 0; i < static_cast<int>(states.size()); ++i)
            if (states[i].name == n) return i;
        return std::nullopt;
    };
    auto find_letter = [&](const std::string& n) -> std::optional<ActionId> {
        for (int i = 0; i < static_cast<int>(alphabet.size()); ++i)
            if (alphabet[i] == n) return i;
        return std::nullopt;
    };

    std::vector<std::string> lines;
    {
        std::string cur;
        for (char ch : text) {
            if (ch == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        lines.push_back(cur);
    }

    struct InitDecl {
        int line;
        int col;
        std::string name;
    };
    std::optional<InitDecl> init_decl;
    for (int ln = 0; ln < static_cast<int>(lines.size()); ++ln) {
        std::string_view line = lines[ln];
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        detail::Cursor c{line, 0, ln + 1, 1};
        if (c.at_end()) continue;
        if (c.eat("alphabet:")) {
            while (!c.at_end()) {
                std::string a = c.ident();
                if (find_letter(a)) c.fail("duplicate letter '" + a + "'");
                alphabet.push_back(a);
            }
        } else if (c.eat("state:")) {
            std::size_t at = c.pos;
            std::string name = c.ident();
            if (!opt.allow_reserved_names && (name == kTopName || name == kBotName)) {
                c.pos = at;
                c.fail("reserved state name '" + name + "'");
            }
            if (find_state(name)) {
                c.pos = at;
                c.fail("duplicate state '" + name + "'");
            }
            int rank = 0;
            if (c.eat("rank")) {
                c.expect("=");
                rank = static_cast<int>(c.integer());
            }
            if (!c.at_end()) c.fail("unexpected text after state declaration");
            states.push_back({name, rank});
        } else if (c.eat("init:")) {
            c.skip_ws();
            int col = c.col();
            std::string name = c.ident();
            if (!c.at_end()) c.fail("unexpected text after init");
            init_decl = InitDecl{ln + 1, col, name};
        } else if (c.eat("trans:")) {
            pending.push_back({ln + 1, std::string(line), c.pos});
        } else {
            c.fail("unknown directive");
        }
    }

    std::vector<TransitionRule> rules;
    if (init_decl) {
        initial = find_state(init_decl->name);
        if (!initial)
            throw ParseError(init_decl->line, init_decl->col,
                             "unknown state '" + init_decl->name + "'");
    }
    for (const auto& p : pending) {
        detail::Cursor c{p.line_text, p.start, p.line, 1};
        TransitionRule r;
        c.skip_ws();
        std::size_t at = c.pos;
        std::string src = c.ident();
        auto q = find_state(src);
        if (!q) {
            c.pos = at;
            c.fail("unknown state '" + src + "'");
        }
        r.source = *q;
        c.expect(",");
        c.skip_ws();
        at = c.pos;
        std::string let = c.ident();
        auto a = find_letter(let);
        if (!a) {
            c.pos = at;
            c.fail("unknown letter '" + let + "'");
        }
        r.letter = *a;
        c.expect(",");
        c.expect("\"");
        r.guard = detail::parse_guard(c);
        c.expect("\"");
        c.expect("->");
        r.formula = detail::parse_formula_dnf(c, find_state);
        if (!c.at_end()) c.fail("unexpected text after formula");
        rules.push_back(std::move(r));
    }
    if (states.empty()) throw ParseError(1, 1, "no states declared");
    if (!initial) throw ParseError(1, 1, "missing init declaration");
    return Automaton(std::move(states), std::move(alphabet), *initial, std::move(rules), 1);
}

inline std::string atom_text(const Automaton& a, const Atom& at) {
    if (at.kind == Atom::Kind::top) return "true";
    if (at.kind == Atom::Kind::bot) return "false";
    return "(" + a.states[at.state].name + "," + (at.reset ? "reset" : "nop") + ")";
}

inline std::string formula_text(const Automaton& a, const std::vector<Disjunct>& f) {
    if (f.empty()) return "false";
    std::string s;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) s += " | ";
        for (std::size_t j = 0; j < f[i].size(); ++j) {
            if (j) s += "&";
            s += atom_text(a, f[i][j]);
        }
        if (f[i].empty()) s += "true";
    }
    return s;
}

inline std::string to_text(const Automaton& a) {
    std::ostringstream os;
    os << "alphabet:";
    for (const auto& l : a.alphabet) os << ' ' << l;
    os << '\n';
    for (const auto& s : a.states) os << "state: " << s.name << " rank=" << s.rank << '\n';
    os << "init: " << a.states[a.initial].name << '\n';
    for (const auto& r : a.rules) {
        if (r.formula.empty()) continue;  // a false formula is the same as no rule
        os << "trans: " << a.states[r.source].name << " , " << a.alphabet[r.letter] << " , \""
           << r.guard.text() << "\" -> " << formula_text(a, r.formula) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------- normalization

namespace detail {

// Guard describing the contiguous run of regions [lo, hi].
inline Guard guard_for_run(int lo, int hi, int d_max) {
    Guard g;
    if (lo == hi && lo % 2 == 0) {
        g.conjuncts.push_back({Cmp::eq, lo / 2});
        return g;
    }
    if (lo % 2 == 0) {
        if (lo > 0) g.conjuncts.push_back({Cmp::ge, lo / 2});
    } else {
        g.conjuncts.push_back({Cmp::gt, (lo - 1) / 2});
    }
    if (hi % 2 == 0) {
        g.conjuncts.push_back({Cmp::le, hi / 2});
    } else if (hi != 2 * d_max + 1) {
        g.conjuncts.push_back({Cmp::lt, (hi + 1) / 2});
    }
    return g;
}

}  // namespace detail

inline Automaton normalize(const Automaton& in) {
    std::vector<State> states = in.states;
    std::optional<StateId> top = in.state_index(kTopName);
    std::optional<StateId> bot = in.state_index(kBotName);

    bool need_top = false, need_bot = false;
    for (const auto& r : in.rules)
        for (const auto& d : r.formula) {
            bool has_nop = false, has_reset = false;
            for (const auto& at : d) {
                if (at.kind == Atom::Kind::top) need_top = true;
                if (at.kind == Atom::Kind::bot) need_bot = true;
                if (at.kind != Atom::Kind::state || !at.reset) has_nop = true;
                if (at.kind == Atom::Kind::state && at.reset) has_reset = true;
            }
            if (!has_nop || !has_reset) need_top = true;
        }
    if (need_top && !top) {
        top = static_cast<StateId>(states.size());
        states.push_back({kTopName, 0});
    }
    if (need_bot && !bot) {
        bot = static_cast<StateId>(states.size());
        states.push_back({kBotName, 0});
    }

    auto fix_disjunct = [&](const Disjunct& d) {
        Disjunct out;
        for (const auto& at : d) {
            if (at.kind == Atom::Kind::top)
                out.push_back(Atom::of(*top, false));
            else if (at.kind == Atom::Kind::bot)
                out.push_back(Atom::of(*bot, false));
            else
                out.push_back(at);
        }
        bool has_nop = std::any_of(out.begin(), out.end(), [](const Atom& x) { return !x.reset; });
        bool has_reset = std::any_of(out.begin(), out.end(), [](const Atom& x) { return x.reset; });
        if (!has_nop) out.push_back(Atom::of(*top, false));
        if (!has_reset) out.push_back(Atom::of(*top, true));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };

    int d_max = std::max(1, in.d_max);
    for (const auto& r : in.rules) d_max = std::max(d_max, r.guard.max_constant());
    const int nreg = Region::count(d_max);

    std::vector<TransitionRule> rules;
    for (StateId q = 0; q < in.num_states(); ++q) {
        for (ActionId a = 0; a < in.num_letters(); ++a) {
            const auto& idx = in.rules_for(q, a);
            if (idx.empty()) continue;
            std::vector<std::vector<Disjunct>> per_region(nreg);
            for (int ri = 0; ri < nreg; ++ri) {
                Region reg{ri};
                std::set<Disjunct> f;
                for (int i : idx)
                    if (in.rules[i].guard.holds(reg.sample(d_max)))
                        for (const auto& d : in.rules[i].formula) f.insert(fix_disjunct(d));
                per_region[ri].assign(f.begin(), f.end());
            }
            int ri = 0;
            while (ri < nreg) {
                if (per_region[ri].empty()) {
                    ++ri;
                    continue;
                }
                int hi = ri;
                while (hi + 1 < nreg && per_region[hi + 1] == per_region[ri]) ++hi;
                rules.push_back({q, a, detail::guard_for_run(ri, hi, d_max), per_region[ri]});
                ri = hi + 1;
            }
        }
    }
    if (top) {
        bool has_rules = false;
        for (const auto& r : rules) has_rules |= (r.source == *top);
        if (!has_rules)
            for (ActionId a = 0; a < in.num_letters(); ++a)
                rules.push_back({*top, a, Guard{},
                                 {Disjunct{Atom::of(*top, false), Atom::of(*top, true)}}});
        states[*top].rank = 0;
    }
    if (bot) states[*bot].rank = 0;
    std::sort(rules.begin(), rules.end(), [](const TransitionRule& x, const TransitionRule& y) {
        return std::tie(x.source, x.letter) < std::tie(y.source, y.letter);
    });
    return Automaton(std::move(states), in.alphabet, in.initial, std::move(rules), d_max);
}

// ---------------------------------------------------------- classification

struct Classification {
    enum class Kind { weak01, out_of_class };
    Kind kind = Kind::weak01;
    int min_rank = 0;
    int max_rank = 0;
    std::string reason;

    bool weak01() const { return kind == Kind::weak01; }
};

inline Classification classify_condition(const Automaton& a) {
    Classification c;
    c.min_rank = c.max_rank = a.states[0].rank;
    for (const auto& s : a.states) {
        c.min_rank = std::min(c.min_rank, s.rank);
        c.max_rank = std::max(c.max_rank, s.rank);
    }
    if (c.min_rank < 0 || c.max_rank > 1) {
        c.kind = Classification::Kind::out_of_class;
        c.reason = "ranks outside {0,1}";
        return c;
    }
    for (const auto& r : a.rules) {
        if (a.rank(r.source) != 0) continue;
        for (const auto& d : r.formula)
            for (const auto& at : d)
                if (at.kind == Atom::Kind::state && a.rank(at.state) != 0) {
                    c.kind = Classification::Kind::out_of_class;
                    c.reason = "rank-0 state " + a.states[r.source].name +
                               " reaches rank-1 state " + a.states[at.state].name;
                    return c;
                }
    }
    return c;
}

inline bool is_normalized(const Automaton& a) {
    for (const auto& r : a.rules)
        for (const auto& d : r.formula) {
            bool n = false, s = false;
            for (const auto& at : d) {
                if (at.kind != Atom::Kind::state) return false;
                (at.reset ? s : n) = true;
            }
            if (!n || !s) return false;
        }
    for (StateId q = 0; q < a.num_states(); ++q)
        for (ActionId l = 0; l < a.num_letters(); ++l)
            for (int ri = 0; ri < Region::count(a.d_max); ++ri)
                if (a.enabled(q, l, Region{ri}).size() > 1) return false;
    return true;
}

}  // namespace wata
