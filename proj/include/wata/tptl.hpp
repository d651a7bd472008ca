#pragma once

#include "wata/automaton.hpp"
#include "wata/solver.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace wata::tptl {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// One-clock TPTL without negation. `release` is the dual until.
struct Formula {
    enum class Kind { prop, freeze, constraint, and_, or_, until, release, eventually, always, true_, false_ };
    Kind kind = Kind::true_;
    std::string name;  // prop
    Cmp cmp = Cmp::le;
    int constant = 0;
    FormulaPtr l, r;  // unary operators use l
};

inline FormulaPtr make(Formula::Kind k, FormulaPtr l = nullptr, FormulaPtr r = nullptr) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->l = std::move(l);
    f->r = std::move(r);
    return f;
}
inline FormulaPtr prop(std::string p) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::prop;
    f->name = std::move(p);
    return f;
}
inline FormulaPtr constraint(Cmp c, int k) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::constraint;
    f->cmp = c;
    f->constant = k;
    return f;
}

// Fully parenthesized text; also the identity of compiled states.
inline std::string text(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::prop: return f.name;
        case K::true_: return "true";
        case K::false_: return "false";
        case K::constraint: return std::string("x") + cmp_text(f.cmp) + std::to_string(f.constant);
        case K::freeze: return "x.(" + text(*f.l) + ")";
        case K::eventually: return "F(" + text(*f.l) + ")";
        case K::always: return "G(" + text(*f.l) + ")";
        case K::and_: return "(" + text(*f.l) + " & " + text(*f.r) + ")";
        case K::or_: return "(" + text(*f.l) + " | " + text(*f.r) + ")";
        case K::until: return "(" + text(*f.l) + " U " + text(*f.r) + ")";
        case K::release: return "(" + text(*f.l) + " R " + text(*f.r) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------- parser

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    FormulaPtr parse() {
        FormulaPtr f = binary();
        skip();
        if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(1, static_cast<int>(pos_) + 1, msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    static bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
    std::string peek_word() {
        skip();
        std::size_t e = pos_;
        while (e < s_.size() && word_char(s_[e])) ++e;
        return std::string(s_.substr(pos_, e - pos_));
    }
    bool eat(std::string_view tok) {
        skip();
        if (s_.substr(pos_, tok.size()) != tok) return false;
        pos_ += tok.size();
        return true;
    }
    bool eat_keyword(std::string_view kw) {
        if (peek_word() != kw) return false;
        pos_ += kw.size();
        return true;
    }

    // U and R bind weakest and associate to the right
    FormulaPtr binary() {
        FormulaPtr l = disjunction();
        if (eat_keyword("U")) return make(Formula::Kind::until, l, binary());
        if (eat_keyword("R")) return make(Formula::Kind::release, l, binary());
        return l;
    }
    FormulaPtr disjunction() {
        FormulaPtr l = conjunction();
        while (eat("|")) l = make(Formula::Kind::or_, l, conjunction());
        return l;
    }
    FormulaPtr conjunction() {
        FormulaPtr l = unary();
        while (eat("&")) l = make(Formula::Kind::and_, l, unary());
        return l;
    }
    FormulaPtr unary() {
        std::string w = peek_word();
        if (w == "F") {
            pos_ += 1;
            return make(Formula::Kind::eventually, unary());
        }
        if (w == "G") {
            pos_ += 1;
            return make(Formula::Kind::always, unary());
        }
        if (w == "x") {
            std::size_t save = pos_;
            pos_ += 1;
            if (eat(".")) return make(Formula::Kind::freeze, unary());
            pos_ = save;
        }
        return primary();
    }
    FormulaPtr primary() {
        skip();
        if (eat("(")) {
            FormulaPtr f = binary();
            if (!eat(")")) fail("expected ')'");
            return f;
        }
        std::string w = peek_word();
        if (w.empty()) fail(pos_ < s_.size() ? "unexpected '" + std::string(1, s_[pos_]) + "'"
                                             : "unexpected end of formula");
        if (w == "U" || w == "R" || w == "F" || w == "G") fail("unexpected '" + w + "'");
        pos_ += w.size();
        if (w == "true") return make(Formula::Kind::true_);
        if (w == "false") return make(Formula::Kind::false_);
        if (w == "x") {
            Cmp c;
            if (eat("<=")) c = Cmp::le;
            else if (eat(">=")) c = Cmp::ge;
            else if (eat("!=")) c = Cmp::ne;
            else if (eat("<")) c = Cmp::lt;
            else if (eat(">")) c = Cmp::gt;
            else if (eat("=")) c = Cmp::eq;
            else fail("expected a comparison after the clock x");
            skip();
            if (pos_ < s_.size() && s_[pos_] == '-') fail("negative constant");
            std::string n = peek_word();
            if (n.empty() || !std::all_of(n.begin(), n.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
                fail("expected an integer constant");
            pos_ += n.size();
            return constraint(c, std::stoi(n));
        }
        if (!std::isalpha(static_cast<unsigned char>(w[0])) && w[0] != '_') fail("bad identifier '" + w + "'");
        return prop(w);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline FormulaPtr parse_formula(std::string_view s) { return detail::Parser(s).parse(); }

// ---------------------------------------------------------------- fragments

struct FragmentClass {
    enum class Kind { positive, constrained, rejected };
    Kind kind = Kind::rejected;
    std::string reason;
};

namespace detail {

inline void conjuncts(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (f->kind == Formula::Kind::and_) {
        conjuncts(f->l, out);
        conjuncts(f->r, out);
    } else {
        out.push_back(f);
    }
}

// Bound c of a positive eventuality F((x<=c) & ...), if any.
inline std::optional<Constraint> eventuality_bound(const FormulaPtr& body) {
    std::vector<FormulaPtr> cs;
    conjuncts(body, cs);
    std::optional<Constraint> best;
    for (const auto& c : cs)
        if (c->kind == Formula::Kind::constraint && (c->cmp == Cmp::le || c->cmp == Cmp::lt))
            if (!best || c->constant < best->constant) best = Constraint{c->cmp, c->constant};
    return best;
}

inline bool positive(const FormulaPtr& f, std::string* why) {
    using K = Formula::Kind;
    switch (f->kind) {
        case K::prop:
        case K::constraint:
        case K::true_:
        case K::false_: return true;
        case K::freeze:
        case K::always: return positive(f->l, why);
        case K::and_:
        case K::or_:
        case K::release: return positive(f->l, why) && positive(f->r, why);
        case K::eventually:
            if (!eventuality_bound(f->l)) {
                if (why) *why = text(*f);
                return false;
            }
            return positive(f->l, why);
        case K::until:
            if (why) *why = text(*f);
            return false;
    }
    return false;
}

inline bool constrained(const FormulaPtr& f, std::string* why) {
    using K = Formula::Kind;
    if (positive(f, nullptr)) return true;
    switch (f->kind) {
        case K::freeze:
        case K::eventually: return constrained(f->l, why);
        case K::and_:
        case K::or_:
        case K::until: return constrained(f->l, why) && constrained(f->r, why);
        case K::release:
        case K::always: {
            std::string inner;
            positive(f, &inner);
            if (why) *why = inner.empty() ? text(*f) : inner;
            return false;
        }
        default: return true;
    }
}

}  // namespace detail

inline FragmentClass classify(const FormulaPtr& f) {
    FragmentClass c;
    if (detail::positive(f, nullptr)) {
        c.kind = FragmentClass::Kind::positive;
    } else if (std::string why; detail::constrained(f, &why)) {
        c.kind = FragmentClass::Kind::constrained;
    } else {
        c.kind = FragmentClass::Kind::rejected;
        c.reason = "not in Constrained TPTL: a dual until or G ranges over the non-positive subformula " + why;
    }
    return c;
}

// ---------------------------------------------------------------- translation

namespace detail {

// One conjunctive way of taking a real transition: an optional required letter,
// accumulated guard, and the successor states (formula, reset).
struct Clause {
    std::optional<std::string> letter;
    Guard guard;
    std::set<std::pair<std::string, bool>> atoms;
};

class Compiler {
public:
    explicit Compiler(const std::vector<std::string>& alphabet) : alphabet_(alphabet) {}

    const std::vector<std::string>& states() const { return order_; }

    std::string state_for(const FormulaPtr& f) {
        std::string key = text(*f);
        if (!formulas_.count(key)) {
            formulas_[key] = f;
            order_.push_back(key);
            pending_.push_back(key);
        }
        return key;
    }

    Automaton run(const FormulaPtr& root) {
        state_for(root);
        std::map<std::string, std::vector<Clause>> behaviour;
        while (!pending_.empty()) {
            std::string k = pending_.front();
            pending_.erase(pending_.begin());
            behaviour[k] = eps(formulas_[k], false);
        }
        std::vector<State> states;
        std::map<std::string, StateId> id;
        for (const auto& k : order_) {
            id[k] = static_cast<StateId>(states.size());
            int rank = positive(formulas_[k], nullptr) ? 0 : 1;
            states.push_back({"s" + std::to_string(states.size()), rank});
        }
        std::vector<TransitionRule> rules;
        for (const auto& k : order_) {
            // group clauses by (letter, guard) into one rule each
            std::map<std::pair<ActionId, Guard>, std::vector<Disjunct>> grouped;
            for (const auto& cl : behaviour[k]) {
                Disjunct d;
                for (const auto& [f, reset] : cl.atoms) d.push_back(Atom::of(id.at(f), reset));
                if (d.empty()) d.push_back(Atom::top());
                std::sort(d.begin(), d.end());
                for (ActionId a = 0; a < static_cast<ActionId>(alphabet_.size()); ++a) {
                    if (cl.letter && *cl.letter != alphabet_[a]) continue;
                    grouped[{a, cl.guard}].push_back(d);
                }
            }
            for (auto& [key, dnf] : grouped) {
                std::sort(dnf.begin(), dnf.end());
                dnf.erase(std::unique(dnf.begin(), dnf.end()), dnf.end());
                rules.push_back({id.at(k), key.first, key.second, std::move(dnf)});
            }
        }
        return Automaton(std::move(states), alphabet_, 0, std::move(rules), 1);
    }

private:
    static std::vector<Clause> conjoin(const std::vector<Clause>& x, const std::vector<Clause>& y) {
        std::vector<Clause> out;
        for (const auto& a : x)
            for (const auto& b : y) {
                if (a.letter && b.letter && *a.letter != *b.letter) continue;
                Clause c = a;
                if (!c.letter) c.letter = b.letter;
                for (const auto& g : b.guard.conjuncts)
                    if (std::find(c.guard.conjuncts.begin(), c.guard.conjuncts.end(), g) == c.guard.conjuncts.end())
                        c.guard.conjuncts.push_back(g);
                std::sort(c.guard.conjuncts.begin(), c.guard.conjuncts.end());
                c.atoms.insert(b.atoms.begin(), b.atoms.end());
                out.push_back(std::move(c));
            }
        return out;
    }

    // Successor clause {f1,...} reached by a real transition; true drops out, false kills it.
    std::vector<Clause> step_to(std::initializer_list<FormulaPtr> next, bool frozen, Guard g = {}) {
        Clause c;
        c.guard = std::move(g);
        for (const auto& f : next) {
            if (f->kind == Formula::Kind::false_) return {};
            if (f->kind == Formula::Kind::true_) continue;
            c.atoms.insert({state_for(f), frozen});
        }
        return {c};
    }

    // ε-closure: rewrite a formula down to real transitions on the current letter.
    // `frozen` means the clock was reset at the current position.
    std::vector<Clause> eps(const FormulaPtr& f, bool frozen) {
        using K = Formula::Kind;
        switch (f->kind) {
            case K::true_: return {Clause{}};
            case K::false_: return {};
            case K::prop: {
                if (std::find(alphabet_.begin(), alphabet_.end(), f->name) == alphabet_.end())
                    throw ParseError(1, 1, "letter '" + f->name + "' is not in the alphabet");
                Clause c;
                c.letter = f->name;
                return {c};
            }
            case K::constraint: {
                Constraint k{f->cmp, f->constant};
                if (frozen) return k.holds(Rational(0)) ? std::vector<Clause>{Clause{}} : std::vector<Clause>{};
                Clause c;
                c.guard.conjuncts.push_back(k);
                return {c};
            }
            case K::freeze: return eps(f->l, true);
            case K::or_: {
                auto x = eps(f->l, frozen);
                auto y = eps(f->r, frozen);
                x.insert(x.end(), y.begin(), y.end());
                return x;
            }
            case K::and_: return conjoin(eps(f->l, frozen), eps(f->r, frozen));
            case K::until: {
                auto x = step_to({f->r}, frozen);
                auto y = step_to({f->l, f}, frozen);
                x.insert(x.end(), y.begin(), y.end());
                return x;
            }
            case K::release: {
                auto x = step_to({f->r, f->l}, frozen);
                auto y = step_to({f->r, f}, frozen);
                x.insert(x.end(), y.begin(), y.end());
                return x;
            }
            case K::always: return step_to({f->l, f}, frozen);
            case K::eventually: {
                auto x = step_to({f->l}, frozen);
                Guard loop;
                if (positive(f, nullptr)) {
                    // an accepting F-state may only wait while the deadline is still ahead
                    Constraint k{Cmp::lt, eventuality_bound(f->l)->constant};
                    if (frozen) {
                        if (!k.holds(Rational(0))) return x;
                    } else {
                        loop.conjuncts.push_back(k);
                    }
                }
                auto y = step_to({f}, frozen, loop);
                x.insert(x.end(), y.begin(), y.end());
                return x;
            }
        }
        return {};
    }

    std::vector<std::string> alphabet_;
    std::map<std::string, FormulaPtr> formulas_;
    std::vector<std::string> order_;
    std::vector<std::string> pending_;
};

}  // namespace detail

struct Translation {
    Automaton automaton;                      // before normalization
    std::vector<std::string> state_formulas;  // formula of state s<i>
};

inline Translation translate(const FormulaPtr& f, const std::vector<std::string>& alphabet) {
    FragmentClass c = classify(f);
    if (c.kind == FragmentClass::Kind::rejected) throw PreconditionError(c.reason);
    if (alphabet.empty()) throw PreconditionError("empty alphabet");
    detail::Compiler comp(alphabet);
    Automaton a = comp.run(f);
    return {std::move(a), comp.states()};
}

inline Automaton compile_raw(const FormulaPtr& f, const std::vector<std::string>& alphabet) {
    return translate(f, alphabet).automaton;
}

inline Automaton compile(const FormulaPtr& f, const std::vector<std::string>& alphabet) {
    return normalize(compile_raw(f, alphabet));
}

inline Verdict satisfiable(const FormulaPtr& f, const std::vector<std::string>& alphabet,
                           const SolverOptions& opt = {}) {
    return decide_emptiness(compile(f, alphabet), opt);
}

}  // namespace wata::tptl
