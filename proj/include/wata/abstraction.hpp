#pragma once

#include "wata/concrete.hpp"
#include "wata/config.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

namespace wata {

struct SigmaBarMove {
    enum class Kind { act, delay_eps, delay_act };
    Kind kind = Kind::act;
    ActionId action = -1;

    bool is_delay() const { return kind != Kind::act; }
    static SigmaBarMove act(ActionId a) { return {Kind::act, a}; }
    static SigmaBarMove delay_eps() { return {Kind::delay_eps, -1}; }
    static SigmaBarMove delay_act(ActionId a) { return {Kind::delay_act, a}; }
    friend auto operator<=>(const SigmaBarMove&, const SigmaBarMove&) = default;
};

inline std::string move_text(const Automaton& a, const SigmaBarMove& m) {
    switch (m.kind) {
        case SigmaBarMove::Kind::act: return a.alphabet[m.action];
        case SigmaBarMove::Kind::delay_eps: return "delay";
        case SigmaBarMove::Kind::delay_act: return "delay," + a.alphabet[m.action];
    }
    return "?";
}

inline std::optional<SigmaBarMove> parse_move(const Automaton& a, std::string_view s) {
    if (s == "delay") return SigmaBarMove::delay_eps();
    if (s.substr(0, 6) == "delay,") {
        if (auto l = a.letter_index(s.substr(6))) return SigmaBarMove::delay_act(*l);
        return std::nullopt;
    }
    if (auto l = a.letter_index(s)) return SigmaBarMove::act(*l);
    return std::nullopt;
}

// Result of firing one letter (or the inf set) on an action:
// nop targets keep their regions, reset targets land at I_1.
struct Step {
    std::uint64_t nop = 0;
    StateSet reset = 0;
    friend auto operator<=>(const Step&, const Step&) = default;
};

using Successor = std::pair<SigmaBarMove, Configuration>;

// The abstract transition system H(A) of a normalized automaton, with memoized letter steps.
class RegionSystem {
public:
    explicit RegionSystem(const Automaton& a) : a_(a), ps_(a) {
        accepting_ = a.accepting_mask();
    }

    const Automaton& automaton() const { return a_; }
    const PairSpace& pairs() const { return ps_; }
    int d_max() const { return a_.d_max; }
    StateSet accepting() const { return accepting_; }

    Configuration initial() const { return Configuration{{ps_.pair(a_.initial, 1)}, 0}; }

    // Letter of pairs at intervals.
    const std::vector<Step>& step_interval(Letter l, ActionId act) const {
        return cached(0, l, act);
    }
    // Same pairs moved to the points {d} at the right end of their intervals.
    const std::vector<Step>& step_point(Letter l, ActionId act) const { return cached(1, l, act); }
    // States beyond d_max.
    const std::vector<Step>& step_inf(StateSet s, ActionId act) const { return cached(2, s, act); }

    std::optional<Configuration> delay_eps(const Configuration& c) const {
        if (c.word.empty()) return std::nullopt;
        const int dm = a_.d_max;
        Letter last = c.word.back();
        Letter raised = 0;
        StateSet inf = c.inf;
        for_each_bit(last, [&](int b) {
            StateId q = ps_.state_of(b);
            int d = ps_.interval_of(b);
            if (d < dm)
                raised |= ps_.pair(q, d + 1);
            else
                inf |= StateSet{1} << q;
        });
        Configuration out;
        if (raised) out.word.push_back(raised);
        out.word.insert(out.word.end(), c.word.begin(), c.word.end() - 1);
        out.inf = inf;
        return out;
    }

    std::vector<Configuration> act_successors(const Configuration& c, ActionId act) const {
        if (c.empty()) return {};
        std::vector<const std::vector<Step>*> opts;
        for (Letter l : c.word) {
            const auto& s = step_interval(l, act);
            if (s.empty()) return {};
            opts.push_back(&s);
        }
        const std::vector<Step>* inf_opts = nullptr;
        if (c.inf) {
            inf_opts = &step_inf(c.inf, act);
            if (inf_opts->empty()) return {};
        }
        std::set<Configuration> out;
        product(opts, inf_opts, [&](const std::vector<const Step*>& pick, const Step* inf_pick) {
            StateSet resets = 0;
            Configuration r;
            r.word.reserve(pick.size() + 1);
            r.word.push_back(0);
            for (const Step* s : pick) {
                resets |= s->reset;
                if (s->nop) r.word.push_back(s->nop);
            }
            if (inf_pick) {
                resets |= inf_pick->reset;
                r.inf = inf_pick->nop;
            }
            r.word[0] = ps_.spread(resets, 1);
            if (!r.word[0]) r.word.erase(r.word.begin());
            out.insert(std::move(r));
        });
        return {out.begin(), out.end()};
    }

    std::vector<Configuration> delay_act_successors(const Configuration& c, ActionId act) const {
        if (c.word.empty())
            throw PreconditionError("no (delay,a) transition from a configuration with empty word");
        const int dm = a_.d_max;
        std::vector<const std::vector<Step>*> opts;
        const auto& last_opts = step_point(c.word.back(), act);
        if (last_opts.empty()) return {};
        for (std::size_t i = 0; i + 1 < c.word.size(); ++i) {
            const auto& s = step_interval(c.word[i], act);
            if (s.empty()) return {};
            opts.push_back(&s);
        }
        opts.push_back(&last_opts);
        const std::vector<Step>* inf_opts = nullptr;
        if (c.inf) {
            inf_opts = &step_inf(c.inf, act);
            if (inf_opts->empty()) return {};
        }
        std::set<Configuration> out;
        product(opts, inf_opts, [&](const std::vector<const Step*>& pick, const Step* inf_pick) {
            StateSet resets = 0;
            Configuration r;
            r.word.push_back(0);
            for (std::size_t i = 0; i + 1 < pick.size(); ++i) {
                resets |= pick[i]->reset;
                if (pick[i]->nop) r.word.push_back(pick[i]->nop);
            }
            const Step* lp = pick.back();
            resets |= lp->reset;
            Letter first = ps_.spread(resets, 1);
            StateSet inf = inf_pick ? inf_pick->nop : 0;
            if (inf_pick) first |= ps_.spread(inf_pick->reset, 1);
            for_each_bit(lp->nop, [&](int b) {
                StateId q = ps_.state_of(b);
                int d = ps_.interval_of(b);  // the point {d}
                if (d < dm)
                    first |= ps_.pair(q, d + 1);
                else
                    inf |= StateSet{1} << q;
            });
            r.word[0] = first;
            if (!first) r.word.erase(r.word.begin());
            r.inf = inf;
            out.insert(std::move(r));
        });
        return {out.begin(), out.end()};
    }

    std::vector<Successor> all_successors(const Configuration& c) const {
        std::vector<Successor> out;
        if (auto d = delay_eps(c)) out.push_back({SigmaBarMove::delay_eps(), *d});
        for (ActionId a = 0; a < a_.num_letters(); ++a)
            for (auto& s : act_successors(c, a)) out.push_back({SigmaBarMove::act(a), s});
        if (!c.word.empty())
            for (ActionId a = 0; a < a_.num_letters(); ++a)
                for (auto& s : delay_act_successors(c, a))
                    out.push_back({SigmaBarMove::delay_act(a), s});
        return out;
    }

    // Successors by delay moves only.
    std::vector<Configuration> delay_successors(const Configuration& c) const {
        std::vector<Configuration> out;
        if (auto d = delay_eps(c)) out.push_back(*d);
        if (!c.word.empty())
            for (ActionId a = 0; a < a_.num_letters(); ++a)
                for (auto& s : delay_act_successors(c, a)) out.push_back(std::move(s));
        return out;
    }

    // Successors by plain letters only.
    std::vector<Configuration> sigma_successors(const Configuration& c) const {
        std::vector<Configuration> out;
        for (ActionId a = 0; a < a_.num_letters(); ++a)
            for (auto& s : act_successors(c, a)) out.push_back(std::move(s));
        return out;
    }

private:
    template <class Fn>
    static void product(const std::vector<const std::vector<Step>*>& opts,
                        const std::vector<Step>* inf_opts, Fn&& fn) {
        std::vector<std::size_t> idx(opts.size(), 0);
        std::size_t inf_idx = 0;
        std::vector<const Step*> pick(opts.size());
        while (true) {
            for (std::size_t i = 0; i < opts.size(); ++i) pick[i] = &(*opts[i])[idx[i]];
            fn(pick, inf_opts ? &(*inf_opts)[inf_idx] : nullptr);
            std::size_t i = 0;
            while (i < opts.size() && ++idx[i] == opts[i]->size()) idx[i++] = 0;
            if (i < opts.size()) continue;
            if (inf_opts && ++inf_idx < inf_opts->size()) continue;
            break;
        }
    }

    // kind 0: intervals, 1: points, 2: inf
    std::vector<Step> compute(int kind, std::uint64_t mask, ActionId act) const {
        std::vector<std::vector<Step>> per_pair;
        auto add_pair = [&](StateId q, Region r, auto&& place) -> bool {
            std::set<Step> alts;
            for (int ri : a_.enabled(q, act, r))
                for (const auto& d : a_.rules[ri].formula) {
                    StateSet n = 0, z = 0;
                    for (const auto& at : d) {
                        if (at.kind != Atom::Kind::state) continue;
                        (at.reset ? z : n) |= StateSet{1} << at.state;
                    }
                    alts.insert(Step{place(n), z});
                }
            if (alts.empty()) return false;
            per_pair.emplace_back(alts.begin(), alts.end());
            return true;
        };
        bool ok = true;
        if (kind == 2) {
            for_each_bit(mask, [&](int q) {
                if (ok) ok = add_pair(q, Region::unbounded(a_.d_max), [](StateSet n) { return n; });
            });
        } else {
            for_each_bit(mask, [&](int b) {
                if (!ok) return;
                StateId q = ps_.state_of(b);
                int d = ps_.interval_of(b);
                Region r = kind == 0 ? Region::interval(d) : Region::point(d);
                ok = add_pair(q, r, [&](StateSet n) { return ps_.spread(n, d); });
            });
        }
        if (!ok) return {};
        std::set<Step> acc{Step{}};
        for (const auto& alts : per_pair) {
            std::set<Step> next;
            for (const auto& s : acc)
                for (const auto& t : alts) next.insert(Step{s.nop | t.nop, s.reset | t.reset});
            acc = std::move(next);
        }
        return {acc.begin(), acc.end()};
    }

    const std::vector<Step>& cached(int kind, std::uint64_t mask, ActionId act) const {
        Key k{mask, act * 3 + kind};
        {
            std::lock_guard<std::mutex> g(mu_);
            auto it = cache_.find(k);
            if (it != cache_.end()) return *it->second;
        }
        auto v = std::make_unique<std::vector<Step>>(compute(kind, mask, act));
        std::lock_guard<std::mutex> g(mu_);
        auto [it, inserted] = cache_.try_emplace(k, std::move(v));
        return *it->second;
    }

    struct Key {
        std::uint64_t mask;
        int tag;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return hash_mix(std::hash<std::uint64_t>{}(k.mask), static_cast<std::size_t>(k.tag));
        }
    };

    const Automaton& a_;
    PairSpace ps_;
    StateSet accepting_ = 0;
    mutable std::mutex mu_;
    mutable std::unordered_map<Key, std::unique_ptr<std::vector<Step>>, KeyHash> cache_;
};

// The H map: sort (state, region, fract) triples by fractional part, group equal parts,
// keep clocks below d_max in the word and put the rest into inf.
inline Configuration h_of(const Automaton& a, const ConcreteConfig& p) {
    PairSpace ps(a);
    std::map<Rational, Letter> by_fract;
    Configuration c;
    for (const auto& [q, v] : p) {
        // A clock sitting on an integer d is read as just after d, like a freshly reset clock:
        // fract 0, region I_{d+1}, or inf when d = d_max.
        if (v >= Rational(a.d_max)) {
            c.inf |= StateSet{1} << q;
            continue;
        }
        Rational f = fract(v);
        int d = static_cast<int>(floor_of(v).numerator()) + 1;
        by_fract[f] |= ps.pair(q, d);
    }
    for (const auto& [f, l] : by_fract) c.word.push_back(l);
    return c;
}

}  // namespace wata
