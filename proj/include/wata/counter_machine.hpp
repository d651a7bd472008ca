#pragma once

#include "wata/automaton.hpp"
#include "wata/concrete.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace wata {

// ------------------------------------------------ counter machines with insertion errors

inline constexpr int kCounters = 5;

struct CmTransition {
    enum class Kind { inc, ifz, dec };
    Kind kind = Kind::inc;
    int from = 0;
    int counter = 1;  // 1..5
    int to = 0;
};

struct CounterMachine {
    std::vector<std::string> states;
    std::vector<bool> accepting;
    int initial = 0;
    std::vector<CmTransition> transitions;

    int state_index(std::string_view name) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline const char* cm_kind_text(CmTransition::Kind k) {
    switch (k) {
        case CmTransition::Kind::inc: return "inc";
        case CmTransition::Kind::ifz: return "ifz";
        case CmTransition::Kind::dec: return "dec";
    }
    return "?";
}

// Names the encoding reserves for its own states and letters.
inline bool cm_reserved(std::string_view n) {
    static const std::set<std::string, std::less<>> r{"c1", "c2", "c3", "c4", "c5", "$",
                                                     "q_inf", "q_minus", "q_init", kTopName, kBotName};
    return r.count(n) > 0;
}

// Format: "state: q [acc]", "init: q", "trans: q inc 3 q2" (also ifz, dec).
inline CounterMachine parse_counter_machine(std::string_view text) {
    CounterMachine m;
    std::istringstream in{std::string(text)};
    std::string line;
    int ln = 0;
    std::string init;
    int init_line = 0;
    struct Pending {
        std::string from, kind, to;
        int counter, line;
    };
    std::vector<Pending> pending;
    while (std::getline(in, line)) {
        ++ln;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        if (head == "state:") {
            std::string name, flag;
            if (!(ls >> name)) throw ParseError(ln, 1, "expected a state name");
            if (cm_reserved(name)) throw ParseError(ln, 1, "reserved state name '" + name + "'");
            if (m.state_index(name) >= 0) throw ParseError(ln, 1, "duplicate state '" + name + "'");
            bool acc = false;
            if (ls >> flag) {
                if (flag != "acc") throw ParseError(ln, 1, "expected 'acc', got '" + flag + "'");
                acc = true;
            }
            m.states.push_back(name);
            m.accepting.push_back(acc);
        } else if (head == "init:") {
            if (!(ls >> init)) throw ParseError(ln, 1, "expected a state name");
            init_line = ln;
        } else if (head == "trans:") {
            Pending p;
            p.line = ln;
            if (!(ls >> p.from >> p.kind >> p.counter >> p.to))
                throw ParseError(ln, 1, "expected: trans: <state> inc|ifz|dec <1..5> <state>");
            if (p.kind != "inc" && p.kind != "ifz" && p.kind != "dec")
                throw ParseError(ln, 1, "unknown instruction '" + p.kind + "'");
            if (p.counter < 1 || p.counter > kCounters) throw ParseError(ln, 1, "counter must be 1..5");
            pending.push_back(p);
        } else {
            throw ParseError(ln, 1, "unknown directive '" + head + "'");
        }
    }
    if (m.states.empty()) throw ParseError(1, 1, "no states declared");
    if (init.empty()) throw ParseError(1, 1, "missing init declaration");
    m.initial = m.state_index(init);
    if (m.initial < 0) throw ParseError(init_line, 1, "unknown state '" + init + "'");
    for (const auto& p : pending) {
        CmTransition t;
        t.from = m.state_index(p.from);
        t.to = m.state_index(p.to);
        if (t.from < 0) throw ParseError(p.line, 1, "unknown state '" + p.from + "'");
        if (t.to < 0) throw ParseError(p.line, 1, "unknown state '" + p.to + "'");
        t.kind = p.kind == "inc" ? CmTransition::Kind::inc
                 : p.kind == "ifz" ? CmTransition::Kind::ifz
                                   : CmTransition::Kind::dec;
        t.counter = p.counter;
        m.transitions.push_back(t);
    }
    return m;
}

// State and letter numbering of the encoding.
struct CmLayout {
    int n;  // machine states occupy 0..n-1
    StateId counter(int i) const { return n + i - 1; }
    StateId dollar() const { return n + 5; }
    StateId q_inf() const { return n + 6; }
    StateId q_minus() const { return n + 7; }
    StateId q_init() const { return n + 8; }
    // letters: one per machine transition, then shc, sh$, new, init
    int t;
    ActionId trans(int k) const { return k; }
    ActionId shc() const { return t; }
    ActionId shd() const { return t + 1; }
    ActionId new_letter() const { return t + 2; }
    ActionId init() const { return t + 3; }

    explicit CmLayout(const CounterMachine& m)
        : n(static_cast<int>(m.states.size())), t(static_cast<int>(m.transitions.size())) {}
};

// Encodes the machine as a one-clock ATA that uses only the regions [0,1] and (1,∞).
// The result is not normalized; its rejecting state q_minus is spawned by q_inf.
inline Automaton encode(const CounterMachine& m) {
    const CmLayout L(m);
    std::vector<State> states;
    for (const auto& s : m.states) states.push_back({s, 0});
    for (int i = 1; i <= kCounters; ++i) states.push_back({"c" + std::to_string(i), 0});
    states.push_back({"$", 0});
    states.push_back({"q_inf", 0});
    states.push_back({"q_minus", 1});
    states.push_back({"q_init", 0});

    std::vector<std::string> alphabet;
    for (std::size_t k = 0; k < m.transitions.size(); ++k) alphabet.push_back("t" + std::to_string(k));
    alphabet.insert(alphabet.end(), {"shc", "sh$", "new", "init"});
    const ActionId n_letters = static_cast<ActionId>(alphabet.size());

    const Guard low{{{Cmp::le, 1}}};
    const Guard high{{{Cmp::gt, 1}}};
    auto nop = [](StateId q) { return Atom::of(q, false); };
    auto rst = [](StateId q) { return Atom::of(q, true); };
    std::vector<TransitionRule> rules;
    auto add = [&](StateId q, ActionId a, const Guard& g, std::vector<Disjunct> f) {
        for (auto& d : f) std::sort(d.begin(), d.end());
        TransitionRule r{q, a, g, std::move(f)};
        if (std::find(rules.begin(), rules.end(), r) == rules.end()) rules.push_back(std::move(r));
    };
    auto is_ifz = [&](ActionId a, int i) {
        return a < L.t && m.transitions[a].kind == CmTransition::Kind::ifz && m.transitions[a].counter == i;
    };

    add(L.q_init(), L.init(), high, {{nop(m.initial), nop(L.q_inf())}});
    for (ActionId a = 0; a < n_letters; ++a) {
        add(L.dollar(), a, low, {{nop(L.dollar())}});
        for (int i = 1; i <= kCounters; ++i)
            if (!is_ifz(a, i)) add(L.counter(i), a, low, {{nop(L.counter(i))}});
    }
    add(L.dollar(), L.shd(), high, {{rst(L.dollar())}});
    for (int i = 1; i <= kCounters; ++i)
        add(L.counter(i), L.shc(), high, {{nop(L.dollar()), rst(L.counter(i))}});
    for (StateId q = 0; q < L.n; ++q)
        for (ActionId a : {L.shd(), L.shc()}) add(q, a, high, {{nop(q)}});
    for (StateId q : {L.q_inf(), L.q_minus()})
        for (ActionId a : {L.shd(), L.shc()}) add(q, a, high, {{nop(q)}});
    for (int k = 0; k < L.t; ++k) {
        const auto& tr = m.transitions[k];
        switch (tr.kind) {
            case CmTransition::Kind::ifz: add(tr.from, k, high, {{nop(tr.to)}}); break;
            case CmTransition::Kind::dec:
                add(tr.from, k, high, {{nop(tr.to)}});
                add(L.counter(tr.counter), k, high, {{Atom::top()}});
                break;
            case CmTransition::Kind::inc:
                add(tr.from, k, high, {{nop(tr.to), nop(L.dollar()), rst(L.counter(tr.counter))}});
                break;
        }
    }
    for (StateId q = 0; q < L.n; ++q) {
        std::vector<Disjunct> f;
        for (int i = 1; i <= kCounters; ++i) f.push_back({nop(q), nop(L.dollar()), rst(L.counter(i))});
        add(q, L.new_letter(), high, f);
    }
    for (ActionId a = 0; a < n_letters; ++a) {
        add(L.q_inf(), a, high, {{nop(L.q_inf()), nop(L.q_minus())}});
        bool to_acc = a < L.t && m.accepting[m.transitions[a].to];
        add(L.q_minus(), a, high, {{to_acc ? Atom::top() : nop(L.q_minus())}});
    }
    return Automaton(std::move(states), std::move(alphabet), L.q_init(), std::move(rules), 1);
}

// Machine configuration: control state and five counters.
struct CmConfig {
    int state = 0;
    std::array<int, kCounters> counters{};
    friend bool operator==(const CmConfig&, const CmConfig&) = default;
};

inline bool well_formed(const ConcreteConfig& p, const CounterMachine& m) {
    const CmLayout L(m);
    auto is_low_state = [&](StateId q) { return q >= L.counter(1) && q <= L.dollar(); };
    int machine = 0, inf = 0;
    std::map<Rational, std::vector<StateId>> low;
    for (const auto& [q, v] : p) {
        if (is_low_state(q) != (v <= 1)) return false;
        if (v <= 1) low[v].push_back(q);
        if (q < L.n) ++machine;
        if (q == L.q_inf()) ++inf;
        if (q == L.q_init()) return false;
    }
    if (machine != 1 || inf != 1) return false;
    StateId prev = -1;
    for (const auto& [v, qs] : low) {
        if (qs.size() > 1) return false;
        if (qs[0] != L.dollar() && prev != L.dollar()) return false;
        prev = qs[0];
    }
    return true;
}

// Machine configuration encoded by a well-formed e-configuration.
inline std::optional<CmConfig> decode(const ConcreteConfig& p, const CounterMachine& m) {
    if (!well_formed(p, m)) return std::nullopt;
    const CmLayout L(m);
    CmConfig c;
    for (const auto& [q, v] : p) {
        if (q < L.n) c.state = q;
        for (int i = 1; i <= kCounters; ++i)
            if (q == L.counter(i)) ++c.counters[i - 1];
    }
    return c;
}

// Drives the encoding along the simulation schedule of a machine run: every machine step
// becomes a short sequence of timed letters, rotating the [0,1] part with sh$/shc when a
// decrement needs its counter symbol to leave [0,1].
class CmSimulator {
public:
    CmSimulator(const CounterMachine& m, const Automaton& a) : m_(m), a_(a), L_(m) {
        p_ = {{L_.q_init(), Rational(0)}};
    }
    // Starts from a given e-configuration at time `now`.
    CmSimulator(const CounterMachine& m, const Automaton& a, ConcreteConfig p, Rational now)
        : m_(m), a_(a), L_(m), p_(std::move(p)), now_(now) {}

    const ConcreteConfig& config() const { return p_; }
    const TimedWord& word() const { return word_; }
    const std::vector<ConcreteConfig>& trace() const { return trace_; }

    bool start() { return fire(L_.init(), Rational(3, 2), nullptr); }

    // Fires machine transition k; false if it is not enabled here.
    bool step(int k) {
        const auto& tr = m_.transitions[k];
        auto cur = decode(p_, m_);
        if (!cur || cur->state != tr.from) return false;
        const StateId ci = L_.counter(tr.counter);
        switch (tr.kind) {
            case CmTransition::Kind::ifz:
                if (cur->counters[tr.counter - 1] != 0) return false;
                return fire(k, small_delay(), nullptr);
            case CmTransition::Kind::inc:
                return fire(k, small_delay(), nullptr) && fire(L_.shd(), small_delay(), nullptr);
            case CmTransition::Kind::dec:
                if (cur->counters[tr.counter - 1] == 0) return false;
                while (true) {
                    auto [top, d] = crossing();
                    if (top == ci) return fire(k, d, nullptr);
                    if (top == L_.dollar()) {
                        if (!fire(L_.shd(), d, nullptr)) return false;
                    } else {
                        if (!fire(L_.shc(), d, nullptr) || !fire(L_.shd(), small_delay(), nullptr))
                            return false;
                    }
                }
        }
        return false;
    }

    // Insertion error on counter i.
    bool insert(int i) {
        const StateId ci = L_.counter(i);
        auto want = [&](const ConcreteConfig& c) { return c.count({ci, Rational(0)}) > 0; };
        return fire(L_.new_letter(), small_delay(), want) && fire(L_.shd(), small_delay(), nullptr);
    }

    // Reads `letter` after `delay`; keeps the first successor accepted by `want`.
    bool fire(ActionId letter, Rational delay, const std::function<bool(const ConcreteConfig&)>& want) {
        auto succ = letter_successors(a_, elapse(p_, delay), letter);
        for (const auto& s : succ)
            if (!want || want(s)) {
                now_ += delay;
                word_.push_back({letter, now_});
                p_ = s;
                trace_.push_back(p_);
                return true;
            }
        return false;
    }

private:
    Rational max_low() const {
        Rational best(-1);
        for (const auto& [q, v] : p_)
            if (v <= 1 && v > best) best = v;
        return best;
    }
    // A positive delay keeping every clock in [0,1] there.
    Rational small_delay() const {
        Rational mx = max_low();
        return mx < 0 ? Rational(1, 2) : (Rational(1) - mx) / 2;
    }
    // The pair with the largest clock in [0,1], and a delay taking only it past 1.
    std::pair<StateId, Rational> crossing() const {
        Rational v1(-1), v2(-1);
        StateId top = -1;
        for (const auto& [q, v] : p_) {
            if (v > 1) continue;
            if (v > v1) {
                v2 = v1;
                v1 = v;
                top = q;
            } else if (v > v2) {
                v2 = v;
            }
        }
        Rational gap = v2 < 0 ? Rational(1) : v1 - v2;
        return {top, Rational(1) - v1 + gap / 2};
    }

    const CounterMachine& m_;
    const Automaton& a_;
    CmLayout L_;
    ConcreteConfig p_;
    Rational now_{0};
    TimedWord word_;
    std::vector<ConcreteConfig> trace_;
};

// ------------------------------------------------ random automata

struct RandomAtaParams {
    int n_states = 2;       // 1..3
    int n_letters = 1;      // 1..2
    int d_max = 1;          // 1..2
    double rank1_bias = 0.5;
    int max_rules = 2;      // per (state, letter)
};

// A normalized weak (0,1) automaton, reproducible from the seed.
inline Automaton random_ata(std::uint64_t seed, const RandomAtaParams& prm = {}) {
    std::mt19937_64 rng(seed);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    std::bernoulli_distribution coin(0.5), rank1(prm.rank1_bias);
    std::vector<State> states;
    for (int i = 0; i < prm.n_states; ++i) states.push_back({"q" + std::to_string(i), rank1(rng) ? 1 : 0});
    std::vector<std::string> alphabet;
    for (int i = 0; i < prm.n_letters; ++i) alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
    auto random_guard = [&]() {
        int lo = uni(0, 2 * prm.d_max + 1), hi = uni(0, 2 * prm.d_max + 1);
        if (lo > hi) std::swap(lo, hi);
        return detail::guard_for_run(lo, hi, prm.d_max);
    };
    std::vector<TransitionRule> rules;
    for (StateId q = 0; q < prm.n_states; ++q) {
        std::vector<StateId> targets;
        for (StateId t = 0; t < prm.n_states; ++t)
            if (states[q].rank == 1 || states[t].rank == 0) targets.push_back(t);
        for (ActionId a = 0; a < prm.n_letters; ++a) {
            int k = uni(0, prm.max_rules);
            for (int r = 0; r < k; ++r) {
                TransitionRule tr{q, a, random_guard(), {}};
                int nd = uni(1, 2);
                for (int d = 0; d < nd; ++d) {
                    Disjunct dj;
                    int na = uni(1, 2);
                    for (int i = 0; i < na; ++i) {
                        if (uni(0, 9) == 0) {
                            dj.push_back(Atom::top());
                            continue;
                        }
                        dj.push_back(Atom::of(targets[uni(0, static_cast<int>(targets.size()) - 1)], coin(rng)));
                    }
                    std::sort(dj.begin(), dj.end());
                    dj.erase(std::unique(dj.begin(), dj.end()), dj.end());
                    tr.formula.push_back(std::move(dj));
                }
                rules.push_back(std::move(tr));
            }
        }
    }
    Automaton a(std::move(states), std::move(alphabet), 0, std::move(rules), prm.d_max);
    return normalize(a);
}

}  // namespace wata
