#pragma once

#include "wata/abstraction.hpp"
#include "wata/acceptor.hpp"
#include "wata/orders.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <vector>

namespace wata {

// Largest pair count for which expansion functions are tabulated over all letters.
inline constexpr int kMaxTabulatedPairs = 12;

inline std::uint64_t letter_universe_size(const PairSpace& ps) {
    if (ps.num_pairs() > kMaxTabulatedPairs)
        throw ResourceError("letter universe too large for compressed configurations (" +
                            std::to_string(ps.num_pairs()) + " pairs)");
    return std::uint64_t{1} << ps.num_pairs();
}

// Map from letters to sets of letters, tabulated over the whole letter universe.
class ExpansionFn {
public:
    using Table = std::vector<std::vector<Letter>>;

    ExpansionFn() : t_(std::make_shared<Table>()) { rehash(); }
    explicit ExpansionFn(Table t) {
        for (auto& v : t) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
        t_ = std::make_shared<const Table>(std::move(t));
        rehash();
    }

    // sgl(λ) = {λ}
    static ExpansionFn identity(const PairSpace& ps) {
        Table t(letter_universe_size(ps));
        for (std::size_t l = 1; l < t.size(); ++l) t[l] = {static_cast<Letter>(l)};
        return ExpansionFn(std::move(t));
    }
    static ExpansionFn from_map(const PairSpace& ps, const std::map<Letter, std::vector<Letter>>& m) {
        Table t(letter_universe_size(ps));
        for (const auto& [k, v] : m) t.at(k) = v;
        return ExpansionFn(std::move(t));
    }

    const std::vector<Letter>& operator()(Letter l) const {
        static const std::vector<Letter> none;
        return l < t_->size() ? (*t_)[l] : none;
    }
    std::size_t domain_size() const { return t_->size(); }
    std::size_t hash() const { return h_; }

    friend bool operator==(const ExpansionFn& x, const ExpansionFn& y) {
        return x.t_ == y.t_ || (x.h_ == y.h_ && *x.t_ == *y.t_);
    }
    friend bool operator<(const ExpansionFn& x, const ExpansionFn& y) {
        if (x.t_ == y.t_) return false;
        if (x.h_ != y.h_) return x.h_ < y.h_;
        return *x.t_ < *y.t_;
    }

private:
    void rehash() {
        std::size_t h = t_->size();
        for (std::size_t i = 0; i < t_->size(); ++i)
            for (Letter l : (*t_)[i]) h = hash_mix(h, std::hash<std::uint64_t>{}(l * 31 + i));
        h_ = h;
    }

    std::shared_ptr<const Table> t_;
    std::size_t h_ = 0;
};

struct CompressedConfiguration {
    std::vector<Letter> head;
    ExpansionFn f;
    StateSet inf = 0;

    Configuration base() const { return Configuration{head, inf}; }

    friend bool operator==(const CompressedConfiguration& x, const CompressedConfiguration& y) {
        return x.head == y.head && x.inf == y.inf && x.f == y.f;
    }
    friend bool operator<(const CompressedConfiguration& x, const CompressedConfiguration& y) {
        if (x.head != y.head) return x.head < y.head;
        if (x.inf != y.inf) return x.inf < y.inf;
        return x.f < y.f;
    }
};

using CoveringFamily = std::vector<CompressedConfiguration>;

// ĉ1 ⊑ ĉ2: equal expansion functions and (head, inf) parts related by ⪯_r.
inline bool compressed_leq(const CompressedConfiguration& c1, const CompressedConfiguration& c2) {
    if (!(c1.f == c2.f)) return false;
    if (c1.head == c2.head && c1.inf == c2.inf) return true;
    return leq_r(c1.base(), c2.base());
}

inline std::vector<Configuration> expand(const CompressedConfiguration& c,
                                         const std::vector<Letter>& ctx) {
    std::vector<std::vector<Letter>> choices;
    for (Letter l : ctx) {
        const auto& ch = c.f(l);
        if (ch.empty()) return {};
        choices.push_back(ch);
    }
    std::set<Configuration> out;
    std::vector<std::size_t> idx(choices.size(), 0);
    while (true) {
        Configuration r{c.head, c.inf};
        for (std::size_t i = 0; i < choices.size(); ++i) r.word.push_back(choices[i][idx[i]]);
        out.insert(std::move(r));
        std::size_t i = 0;
        while (i < choices.size() && ++idx[i] == choices[i].size()) idx[i++] = 0;
        if (i == choices.size()) break;
    }
    return {out.begin(), out.end()};
}

inline std::vector<Configuration> expand(const CoveringFamily& fam, const std::vector<Letter>& ctx) {
    std::set<Configuration> out;
    for (const auto& c : fam)
        for (auto& e : expand(c, ctx)) out.insert(std::move(e));
    return {out.begin(), out.end()};
}

// Builds covering families for one automaton. Expansion tables are shared between
// structurally equal functions.
class CoveringBuilder {
public:
    explicit CoveringBuilder(const RegionSystem& sys)
        : sys_(sys), ps_(sys.pairs()), universe_(letter_universe_size(ps_)) {
        identity_ = intern(ExpansionFn::identity(ps_));
    }

    const ExpansionFn& identity() const { return identity_; }

    // Members cover the (delay,·)-successors of (w·last, inf) by expansion in the context w.
    CoveringFamily covering_delay(Letter last, StateSet inf) {
        std::set<CompressedConfiguration> items;
        const int dm = ps_.d_max;
        {
            Letter raised = 0;
            StateSet inf2 = inf;
            for_each_bit(last, [&](int b) {
                int d = ps_.interval_of(b);
                if (d < dm)
                    raised |= ps_.pair(ps_.state_of(b), d + 1);
                else
                    inf2 |= StateSet{1} << ps_.state_of(b);
            });
            CompressedConfiguration e{{}, identity_, inf2};
            if (raised) e.head.push_back(raised);
            items.insert(e);
        }
        const std::vector<Step> no_inf{Step{}};
        for (ActionId a = 0; a < sys_.automaton().num_letters(); ++a) {
            const auto& lk = sys_.step_point(last, a);
            const auto& io = inf ? sys_.step_inf(inf, a) : no_inf;
            if (lk.empty() || io.empty()) continue;
            StateSet r_all = reset_range(a);
            for (const Step& sk : lk)
                for (const Step& si : io) {
                    Letter raised = 0;
                    StateSet inf2 = si.nop;
                    for_each_bit(sk.nop, [&](int b) {
                        int d = ps_.interval_of(b);
                        if (d < dm)
                            raised |= ps_.pair(ps_.state_of(b), d + 1);
                        else
                            inf2 |= StateSet{1} << ps_.state_of(b);
                    });
                    StateSet fixed = sk.reset | si.reset;
                    for_each_submask(r_all, [&](StateSet g0) {
                        Letter gamma = ps_.spread(fixed | g0, 1) | raised;
                        if (!gamma) return;
                        items.insert({{gamma}, compose(identity_, a, g0), inf2});
                    });
                }
        }
        return {items.begin(), items.end()};
    }

    // Members cover the plain-letter successors of the expansions of c0.
    CoveringFamily covering_step(const CompressedConfiguration& c0) {
        std::set<CompressedConfiguration> items;
        const std::vector<Step> no_inf{Step{}};
        for (ActionId a = 0; a < sys_.automaton().num_letters(); ++a) {
            std::vector<const std::vector<Step>*> head_opts;
            bool blocked = false;
            for (Letter l : c0.head) {
                const auto& s = sys_.step_interval(l, a);
                if (s.empty()) blocked = true;
                head_opts.push_back(&s);
            }
            const auto& io = c0.inf ? sys_.step_inf(c0.inf, a) : no_inf;
            if (blocked || io.empty()) continue;
            StateSet r_rng = range_resets(c0.f, a);
            std::vector<std::size_t> idx(head_opts.size(), 0);
            while (true) {
                std::vector<Letter> rest;
                StateSet fixed = 0;
                for (std::size_t i = 0; i < head_opts.size(); ++i) {
                    const Step& s = (*head_opts[i])[idx[i]];
                    fixed |= s.reset;
                    if (s.nop) rest.push_back(s.nop);
                }
                for (const Step& si : io) {
                    for_each_submask(r_rng, [&](StateSet g0) {
                        Letter gamma = ps_.spread(fixed | si.reset | g0, 1);
                        if (!gamma) return;
                        CompressedConfiguration item;
                        item.head.push_back(gamma);
                        item.head.insert(item.head.end(), rest.begin(), rest.end());
                        item.f = compose(c0.f, a, g0);
                        item.inf = si.nop;
                        items.insert(std::move(item));
                    });
                }
                std::size_t i = 0;
                while (i < idx.size() && ++idx[i] == head_opts[i]->size()) idx[i++] = 0;
                if (i == idx.size()) break;
            }
        }
        return {items.begin(), items.end()};
    }

    // Closure of {(ε, sgl, inf)} under covering_step, kept as a ⊑-antichain.
    CoveringFamily covering_sigma_star(StateSet inf, Budget* budget = nullptr) {
        std::vector<CompressedConfiguration> fam;
        std::deque<CompressedConfiguration> work;
        auto add = [&](const CompressedConfiguration& c) {
            for (const auto& g : fam)
                if (compressed_leq(g, c)) return;
            std::erase_if(fam, [&](const CompressedConfiguration& g) { return compressed_leq(c, g); });
            fam.push_back(c);
            work.push_back(c);
        };
        add({{}, identity_, inf});
        while (!work.empty()) {
            CompressedConfiguration c = std::move(work.front());
            work.pop_front();
            if (std::find(fam.begin(), fam.end(), c) == fam.end()) continue;  // superseded
            if (budget) budget->charge();
            for (const auto& s : covering_step(c)) add(s);
        }
        std::sort(fam.begin(), fam.end());
        return fam;
    }

    // Letters reachable by one a-step of l whose resets stay inside g0.
    const std::vector<Letter>& restricted_images(Letter l, ActionId a, StateSet g0) {
        auto key = std::make_tuple(l, a, g0);
        auto it = images_.find(key);
        if (it != images_.end()) return it->second;
        std::vector<Letter> v;
        for (const Step& s : sys_.step_interval(l, a))
            if (subset_of(s.reset, g0) && s.nop) v.push_back(s.nop);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return images_.emplace(key, std::move(v)).first->second;
    }

    // f'(λ) = { λ'' : λ' ∈ f(λ), λ' →a (λ'', γ) with γ ⊆ g0 }
    ExpansionFn compose(const ExpansionFn& f, ActionId a, StateSet g0) {
        ExpansionFn::Table t(universe_);
        for (std::size_t l = 1; l < universe_; ++l) {
            auto& out = t[l];
            for (Letter m : f(static_cast<Letter>(l))) {
                const auto& im = restricted_images(m, a, g0);
                out.insert(out.end(), im.begin(), im.end());
            }
        }
        return intern(ExpansionFn(std::move(t)));
    }

    ExpansionFn intern(ExpansionFn f) {
        auto it = pool_.find(f);
        if (it != pool_.end()) return *it;
        pool_.insert(f);
        return f;
    }

private:
    template <class Fn>
    static void for_each_submask(StateSet m, Fn&& fn) {
        StateSet s = m;
        while (true) {
            fn(s);
            if (s == 0) break;
            s = (s - 1) & m;
        }
    }

    // All reset targets of a-steps of any letter.
    StateSet reset_range(ActionId a) {
        auto it = reset_range_.find(a);
        if (it != reset_range_.end()) return it->second;
        StateSet r = 0;
        for (int b = 0; b < ps_.num_pairs(); ++b)
            for (const Step& s : sys_.step_interval(Letter{1} << b, a)) r |= s.reset;
        reset_range_[a] = r;
        return r;
    }

    // Reset targets of a-steps of letters in the range of f.
    StateSet range_resets(const ExpansionFn& f, ActionId a) {
        StateSet r = 0;
        std::set<Letter> seen;
        for (std::size_t l = 1; l < f.domain_size(); ++l)
            for (Letter m : f(static_cast<Letter>(l))) {
                if (!seen.insert(m).second) continue;
                for (const Step& s : sys_.step_interval(m, a)) r |= s.reset;
            }
        return r;
    }

    const RegionSystem& sys_;
    PairSpace ps_;
    std::size_t universe_;
    ExpansionFn identity_;
    std::set<ExpansionFn> pool_;
    std::map<std::tuple<Letter, ActionId, StateSet>, std::vector<Letter>> images_;
    std::map<ActionId, StateSet> reset_range_;
};

inline CoveringFamily covering_delay(const RegionSystem& sys, Letter last, StateSet inf) {
    CoveringBuilder b(sys);
    return b.covering_delay(last, inf);
}

inline CoveringFamily covering_step(const RegionSystem& sys, const CompressedConfiguration& c0) {
    CoveringBuilder b(sys);
    return b.covering_step(c0);
}

inline CoveringFamily covering_sigma_star(const RegionSystem& sys, StateSet inf,
                                          Budget* budget = nullptr) {
    CoveringBuilder b(sys);
    return b.covering_sigma_star(inf, budget);
}

// ----------------------------------------------- acceptors for { w : Exp(ĉ,w) ⊆ X }

// Deterministic acceptor of one member, explored on demand. States are sets of profiles,
// one per expansion branch; the empty set means the expansion is empty.
class MemberAcceptor {
public:
    MemberAcceptor(const CompressedConfiguration& c, const UpSet& x)
        : c_(c), tracker_(x, c.inf) {
        Profile p = tracker_.start();
        for (Letter l : c.head) p = tracker_.feed(p, l);
        start_ = intern({p});
    }

    int start() const { return start_; }
    int next(int s, Letter l) {
        auto key = std::make_pair(s, l);
        auto it = trans_.find(key);
        if (it != trans_.end()) return it->second;
        std::set<Profile> out;
        for (const Profile& p : states_[s])
            for (Letter m : c_.f(l)) out.insert(tracker_.feed(p, m));
        int t = intern({out.begin(), out.end()});
        trans_[key] = t;
        return t;
    }
    bool accepting(int s) const {
        for (const Profile& p : states_[s])
            if (!tracker_.accepting(p)) return false;
        return true;
    }
    int intern(std::vector<Profile> v) {
        auto [it, ins] = ids_.try_emplace(v, static_cast<int>(states_.size()));
        if (ins) states_.push_back(std::move(v));
        return it->second;
    }
    int num_states() const { return static_cast<int>(states_.size()); }

private:
    CompressedConfiguration c_;
    ProfileTracker tracker_;
    std::vector<std::vector<Profile>> states_;
    std::map<std::vector<Profile>, int> ids_;
    std::map<std::pair<int, Letter>, int> trans_;
    int start_ = 0;
};

inline bool check_exp_subset(const CoveringFamily& fam, const std::vector<Letter>& ctx,
                             const UpSet& x) {
    for (const auto& c : fam) {
        MemberAcceptor acc(c, x);
        int s = acc.start();
        for (Letter l : ctx) s = acc.next(s, l);
        if (!acc.accepting(s)) return false;
    }
    return true;
}

// State count of the minimized acceptor of one member, including the empty-expansion sink.
inline int member_bound(const PairSpace& ps, const CompressedConfiguration& c, const UpSet& x,
                        Budget* budget = nullptr) {
    const std::uint64_t universe = letter_universe_size(ps);
    MemberAcceptor acc(c, x);
    acc.intern({});
    std::vector<std::vector<int>> trans;
    for (int s = 0; s < acc.num_states(); ++s) {
        if (budget) budget->charge(universe);
        std::vector<int> row;
        for (std::uint64_t l = 1; l < universe; ++l) row.push_back(acc.next(s, l));
        trans.push_back(std::move(row));
    }
    std::vector<bool> accepting(trans.size());
    for (int s = 0; s < acc.num_states(); ++s) accepting[s] = acc.accepting(s);
    return moore_classes(accepting, trans);
}

// B(X, family) = sum of per-member acceptor sizes.
inline int bound_B(const PairSpace& ps, const CoveringFamily& fam, const UpSet& x,
                   Budget* budget = nullptr) {
    int b = 0;
    for (const auto& c : fam) b += member_bound(ps, c, x, budget);
    return b;
}

// Deletion-minimal subsequence of ctx keeping Exp(fam, ·) ⊆ x.
inline std::vector<Letter> shrink(const CoveringFamily& fam, std::vector<Letter> ctx,
                                  const UpSet& x) {
    if (!check_exp_subset(fam, ctx, x)) throw PreconditionError("shrink: inclusion does not hold");
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            std::vector<Letter> t = ctx;
            t.erase(t.begin() + static_cast<std::ptrdiff_t>(i));
            if (check_exp_subset(fam, t, x)) {
                ctx = std::move(t);
                changed = true;
                break;
            }
        }
    }
    return ctx;
}

}  // namespace wata
