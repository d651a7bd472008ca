#pragma once

#include "wata/abstraction.hpp"
#include "wata/acceptor.hpp"
#include "wata/compressed.hpp"
#include "wata/orders.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <thread>
#include <unordered_map>
#include <vector>

namespace wata {

// ------------------------------------------------------------ memberships

// All (delay,·)-successors of c lie in x. Vacuous for an empty word.
inline bool pre_delay_member(const RegionSystem& sys, const Configuration& c, const UpSet& x) {
    for (const auto& d : sys.delay_successors(c))
        if (!x.contains(d)) return false;
    return true;
}

// Every configuration reachable from c by plain letters (c included) lies in y.
// Explores the reachability tree, cutting a node that has a ⪯_r-smaller ancestor.
inline bool pre_sigma_member(const RegionSystem& sys, const Configuration& c, const UpSet& y,
                             Budget* budget = nullptr) {
    struct Node {
        Configuration c;
        int parent;
    };
    std::vector<Node> nodes{{c, -1}};
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        if (budget) budget->charge();
        const Configuration cur = nodes[i].c;
        if (!y.contains(cur)) return false;
        bool cut = false;
        for (int p = nodes[i].parent; p >= 0 && !cut; p = nodes[p].parent)
            cut = leq_r(nodes[p].c, cur);
        if (cut) continue;
        for (auto& s : sys.sigma_successors(cur)) {
            nodes.push_back({std::move(s), i});
            stack.push_back(static_cast<int>(nodes.size()) - 1);
        }
    }
    return true;
}

// ------------------------------------------------ enumeration by size

// Calls fn on every configuration of the given size (pairs in the word plus |inf|).
template <class Fn>
void for_each_configuration_of_size(const PairSpace& ps, int size, Fn&& fn) {
    const Letter all = ps.all_pairs();
    std::vector<Letter> word;
    std::function<void(int, StateSet)> words = [&](int remaining, StateSet inf) {
        if (remaining == 0) {
            fn(Configuration{word, inf});
            return;
        }
        for (Letter l = 1; l <= all; ++l) {
            int k = popcount(l);
            if (k > remaining) continue;
            word.push_back(l);
            words(remaining - k, inf);
            word.pop_back();
        }
    };
    const int n = ps.num_states;
    for (StateSet inf = 0; inf < (StateSet{1} << n); ++inf) {
        int k = popcount(inf);
        if (k > size) continue;
        words(size - k, inf);
    }
}

struct EnumerationResult {
    UpSet generators;
    bool exact = true;
    std::uint64_t candidates = 0;
};

// Minimal members of an upward-closed predicate, by nondecreasing size.
// Configurations of the same size are never strictly ordered, so a member that is not
// above an earlier generator is minimal.
inline EnumerationResult enumerate_min_generators(
    const PairSpace& ps, const std::function<bool(const Configuration&)>& member, Order order,
    int stop_bound, std::optional<std::uint64_t> cap = std::nullopt, int min_size = 0,
    int threads = 1) {
    EnumerationResult r{UpSet(order), true, 0};
    for (int n = min_size; n <= stop_bound; ++n) {
        std::vector<Configuration> cands;
        for_each_configuration_of_size(ps, n, [&](const Configuration& c) {
            if (order == Order::leq_r && c.word.empty()) return;
            if (!r.generators.contains(c)) cands.push_back(c);
        });
        if (cap && r.candidates + cands.size() > *cap) {
            r.exact = false;
            return r;
        }
        r.candidates += cands.size();
        std::vector<char> ok(cands.size(), 0);
        int t = std::max(1, threads);
        if (t == 1 || cands.size() < 2) {
            for (std::size_t i = 0; i < cands.size(); ++i) ok[i] = member(cands[i]);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (int k = 0; k < t; ++k)
                pool.emplace_back([&] {
                    for (std::size_t i; (i = next++) < cands.size();) ok[i] = member(cands[i]);
                });
            for (auto& th : pool) th.join();
        }
        for (std::size_t i = 0; i < cands.size(); ++i)
            if (ok[i]) r.generators.insert(cands[i]);
    }
    return r;
}

// ------------------------------------------------ minimal words of lazy DFAs

// Subsequence-minimal accepted words of a DFA over the letter universe, explored on demand.
// Prefixes are taken by (length, pair count). A prefix is dropped when an earlier kept prefix
// reaching the same state embeds into it: every completion of it is then above an accepted
// word. Kept prefixes of one state form an antichain, so the search ends.
// With skip_empty the empty word is never reported and the search continues below it.
template <class Dfa, class Prune, class Found>
void minimal_words(Dfa& dfa, std::uint64_t universe, Prune&& prune, Found&& found,
                   Budget& budget, bool skip_empty = false) {
    const int start = dfa.start();
    std::vector<std::vector<int>> trans;
    std::vector<int> order{start};
    std::unordered_map<int, int> local{{start, 0}};
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::vector<int> row(universe, -1);
        for (std::uint64_t l = 1; l < universe; ++l) {
            budget.charge();
            int t = dfa.next(order[i], static_cast<Letter>(l));
            auto [it, ins] = local.try_emplace(t, static_cast<int>(order.size()));
            if (ins) order.push_back(t);
            row[l] = it->second;
        }
        trans.push_back(std::move(row));
    }
    const int n = static_cast<int>(order.size());
    std::vector<std::vector<int>> back(n);
    for (int v = 0; v < n; ++v)
        for (std::uint64_t l = 1; l < universe; ++l) back[trans[v][l]].push_back(v);
    std::vector<char> accepting(n), live(n);
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if ((accepting[v] = dfa.accepting(order[v]))) {
            live[v] = 1;
            queue.push_back(v);
        }
    while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        for (int u : back[v])
            if (!live[u]) {
                live[u] = 1;
                queue.push_back(u);
            }
    }
    if (!live[0]) return;

    struct Node {
        std::vector<Letter> word;
        int state;
        int size;
    };
    std::vector<std::vector<std::vector<Letter>>> kept(n);
    auto dominated = [&](const std::vector<Letter>& w, int v) {
        for (const auto& u : kept[v])
            if (embeds(u.data(), u.size(), w.data(), w.size())) return true;
        return false;
    };
    std::vector<Node> layer{{{}, 0, 0}};
    while (!layer.empty()) {
        std::stable_sort(layer.begin(), layer.end(),
                         [](const Node& x, const Node& y) { return x.size < y.size; });
        std::vector<Node> next;
        for (auto& nd : layer) {
            budget.charge();
            if (prune(nd.word) || dominated(nd.word, nd.state)) continue;
            kept[nd.state].push_back(nd.word);
            if (accepting[nd.state] && !(skip_empty && nd.word.empty())) {
                found(nd.word);
                continue;
            }
            for (std::uint64_t l = 1; l < universe; ++l) {
                const int t = trans[nd.state][l];
                if (!live[t]) continue;
                std::vector<Letter> w = nd.word;
                w.push_back(static_cast<Letter>(l));
                if (dominated(w, t)) continue;
                next.push_back({std::move(w), t, nd.size + popcount(static_cast<Letter>(l))});
            }
        }
        layer = std::move(next);
    }
}

// Acceptor of { w : every (delay,·)-successor of (w·last, inf) lies in X }.
// Each (delay,a) branch guesses the union of resets the context will contribute and checks
// the guess at the end.
class DelayShapeAcceptor {
public:
    DelayShapeAcceptor(const RegionSystem& sys, const UpSet& x, Letter last, StateSet inf)
        : sys_(sys) {
        const PairSpace& ps = sys.pairs();
        const int dm = ps.d_max;
        auto raise = [&](Letter l, Letter& raised, StateSet& over) {
            for_each_bit(l, [&](int b) {
                int d = ps.interval_of(b);
                if (d < dm)
                    raised |= ps.pair(ps.state_of(b), d + 1);
                else
                    over |= StateSet{1} << ps.state_of(b);
            });
        };
        State st;
        {
            Letter raised = 0;
            StateSet inf2 = inf;
            raise(last, raised, inf2);
            trackers_.emplace_back(x, inf2);
            Profile p = trackers_[0].start();
            if (raised) p = trackers_[0].feed(p, raised);
            st.eps = p;
        }
        const std::vector<Step> no_inf{Step{}};
        for (ActionId a = 0; a < sys.automaton().num_letters(); ++a) {
            const auto& lk = sys.step_point(last, a);
            const auto& io = inf ? sys.step_inf(inf, a) : no_inf;
            if (lk.empty() || io.empty()) continue;
            StateSet r_all = 0;
            for (int b = 0; b < ps.num_pairs(); ++b)
                for (const Step& s : sys.step_interval(Letter{1} << b, a)) r_all |= s.reset;
            for (const Step& sk : lk)
                for (const Step& si : io) {
                    Letter raised = 0;
                    StateSet inf2 = si.nop;
                    raise(sk.nop, raised, inf2);
                    Letter fixed = ps.spread(sk.reset | si.reset, 1) | raised;
                    int bi = static_cast<int>(branches_.size());
                    branches_.push_back({a});
                    trackers_.emplace_back(x, inf2);
                    const ProfileTracker& tr = trackers_.back();
                    StateSet g = r_all;
                    while (true) {
                        Profile p = tr.start();
                        if (Letter first = fixed | ps.spread(g, 1)) p = tr.feed(p, first);
                        if (!p.top) st.elems.push_back({bi, g, 0, p});
                        if (g == 0) break;
                        g = (g - 1) & r_all;
                    }
                }
        }
        normalize_state(st);
        start_ = intern(std::move(st));
    }

    int start() const { return start_; }
    bool accepting(int s) const {
        const State& st = states_[s];
        if (!trackers_[0].accepting(st.eps)) return false;
        for (const auto& e : st.elems)
            if (e.acc == e.guess && !trackers_[e.branch + 1].accepting(e.p)) return false;
        return true;
    }
    int next(int s, Letter l) {
        auto key = std::make_pair(s, l);
        if (auto it = trans_.find(key); it != trans_.end()) return it->second;
        const State cur = states_[s];
        State nx;
        nx.eps = trackers_[0].feed(cur.eps, l);
        for (const auto& e : cur.elems) {
            const ProfileTracker& tr = trackers_[e.branch + 1];
            for (const Step& t : sys_.step_interval(l, branches_[e.branch].action)) {
                if (!subset_of(t.reset, e.guess)) continue;
                Profile p = t.nop ? tr.feed(e.p, t.nop) : e.p;
                if (p.top) continue;
                nx.elems.push_back({e.branch, e.guess, e.acc | t.reset, p});
            }
        }
        normalize_state(nx);
        int t = intern(std::move(nx));
        trans_[key] = t;
        return t;
    }
    std::size_t num_states() const { return states_.size(); }

private:
    struct Elem {
        int branch;
        StateSet guess;
        StateSet acc;
        Profile p;
        friend auto operator<=>(const Elem&, const Elem&) = default;
    };
    struct State {
        Profile eps;
        std::vector<Elem> elems;
        friend auto operator<=>(const State&, const State&) = default;
    };
    struct Branch {
        ActionId action;
    };

    static void normalize_state(State& s) {
        std::sort(s.elems.begin(), s.elems.end());
        s.elems.erase(std::unique(s.elems.begin(), s.elems.end()), s.elems.end());
    }
    int intern(State s) {
        auto [it, ins] = ids_.try_emplace(s, static_cast<int>(states_.size()));
        if (ins) states_.push_back(std::move(s));
        return it->second;
    }

    const RegionSystem& sys_;
    std::vector<ProfileTracker> trackers_;  // [0] for the delay-ε successor, then per branch
    std::vector<Branch> branches_;
    std::vector<State> states_;
    std::map<State, int> ids_;
    std::map<std::pair<int, Letter>, int> trans_;
    int start_ = 0;
};

// Acceptor of { w : Exp(family, w) ⊆ Y } for a whole covering family.
class FamilyAcceptor {
public:
    FamilyAcceptor(const CoveringFamily& fam, const UpSet& y) : fam_(fam) {
        std::vector<Elem> st;
        for (std::size_t m = 0; m < fam.size(); ++m) {
            trackers_.emplace_back(y, fam[m].inf);
            Profile p = trackers_.back().start();
            for (Letter l : fam[m].head) p = trackers_.back().feed(p, l);
            st.push_back({static_cast<int>(m), p});
        }
        start_ = intern(std::move(st));
    }
    int start() const { return start_; }
    bool accepting(int s) const {
        for (const auto& e : states_[s])
            if (!trackers_[e.member].accepting(e.p)) return false;
        return true;
    }
    int next(int s, Letter l) {
        auto key = std::make_pair(s, l);
        if (auto it = trans_.find(key); it != trans_.end()) return it->second;
        std::set<Elem> nx;
        for (const auto& e : states_[s])
            for (Letter m : fam_[e.member].f(l)) nx.insert({e.member, trackers_[e.member].feed(e.p, m)});
        int t = intern({nx.begin(), nx.end()});
        trans_[key] = t;
        return t;
    }
    std::size_t num_states() const { return states_.size(); }

private:
    struct Elem {
        int member;
        Profile p;
        friend auto operator<=>(const Elem&, const Elem&) = default;
    };
    int intern(std::vector<Elem> v) {
        auto [it, ins] = ids_.try_emplace(v, static_cast<int>(states_.size()));
        if (ins) states_.push_back(std::move(v));
        return it->second;
    }

    const CoveringFamily& fam_;
    std::vector<ProfileTracker> trackers_;
    std::vector<std::vector<Elem>> states_;
    std::map<std::vector<Elem>, int> ids_;
    std::map<std::pair<int, Letter>, int> trans_;
    int start_ = 0;
};

namespace detail {

// Runs independent jobs on up to `threads` workers; each job gets its own budget.
template <class Job>
void run_batch(std::vector<Job>& jobs, int threads) {
    if (threads <= 1 || jobs.size() < 2) {
        for (auto& j : jobs) j();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < jobs.size();) jobs[i]();
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

struct GeneratorStats {
    std::uint64_t work = 0;
};

namespace detail {

inline constexpr std::size_t kChunk = 32;

// Runs `search` on every key, smallest group first, in fixed chunks. Each search sees the
// generators found before its chunk, so results and work counts do not depend on threads.
template <class Key, class Search>
void search_in_chunks(const std::map<int, std::vector<Key>>& groups, Search&& search, UpSet& out,
                      Budget& budget, int threads, GeneratorStats* stats) {
    for (const auto& [sz, keys] : groups) {
        for (std::size_t from = 0; from < keys.size(); from += kChunk) {
            const std::size_t n = std::min(kChunk, keys.size() - from);
            const UpSet frozen = out;
            const std::uint64_t remaining = budget.limit - std::min(budget.limit, budget.used);
            std::vector<std::vector<Configuration>> found(n);
            std::vector<std::uint64_t> used(n, 0);
            std::vector<std::string> errors(n);
            std::vector<std::function<void()>> jobs;
            for (std::size_t i = 0; i < n; ++i)
                jobs.push_back([&, i] {
                    Budget local{remaining, 0};
                    try {
                        found[i] = search(keys[from + i], frozen, local);
                    } catch (const ResourceError& e) {
                        errors[i] = e.what();
                    }
                    used[i] = local.used;
                });
            run_batch(jobs, threads);
            for (std::size_t i = 0; i < n; ++i) {
                if (stats) stats->work += used[i];
                budget.charge(used[i]);
                if (!errors[i].empty()) throw ResourceError(errors[i]);
                for (const auto& c : found[i]) out.insert(c);
            }
        }
    }
}

}  // namespace detail

// ⪯_r-minimal generators of pre∀_delay(X). Configurations with an empty word are always
// members; they are recorded through the up-set flag.
inline UpSet pre_delay_generators(const RegionSystem& sys, const UpSet& x, Budget& budget,
                                  int threads = 1, GeneratorStats* stats = nullptr) {
    const PairSpace& ps = sys.pairs();
    const std::uint64_t universe = letter_universe_size(ps);
    UpSet y(Order::leq_r);
    y.set_empty_word_members(true);
    // one search per shape (last letter, inf)
    std::map<int, std::vector<std::pair<Letter, StateSet>>> by_size;
    for (Letter l = 1; l < universe; ++l)
        for (StateSet inf = 0; inf < (StateSet{1} << ps.num_states); ++inf)
            by_size[popcount(l) + popcount(inf)].push_back({l, inf});
    auto search = [&](std::pair<Letter, StateSet> shape, const UpSet& frozen, Budget& local) {
        auto [last, inf] = shape;
        std::vector<Configuration> mine;
        if (frozen.contains(Configuration{{last}, inf})) return mine;
        local.charge();
        DelayShapeAcceptor acc(sys, x, last, inf);
        auto cfg = [&](const std::vector<Letter>& w) {
            Configuration c{w, inf};
            c.word.push_back(last);
            return c;
        };
        minimal_words(
            acc, universe,
            [&](const std::vector<Letter>& w) {
                Configuration c = cfg(w);
                if (frozen.contains(c)) return true;
                for (const auto& g : mine)
                    if (leq_r(g, c)) return true;
                return false;
            },
            [&](const std::vector<Letter>& w) { mine.push_back(cfg(w)); }, local);
        return mine;
    };
    detail::search_in_chunks(by_size, search, y, budget, threads, stats);
    return y;
}

// ⪯-minimal generators of pre∀_Σ*(Y), leaving out the empty configuration (ε,∅).
inline UpSet pre_sigma_generators(const RegionSystem& sys, const UpSet& y, Budget& budget,
                                  int threads = 1, GeneratorStats* stats = nullptr) {
    const PairSpace& ps = sys.pairs();
    const std::uint64_t universe = letter_universe_size(ps);
    UpSet z(Order::leq);
    std::map<int, std::vector<StateSet>> by_size;
    for (StateSet inf = 0; inf < (StateSet{1} << ps.num_states); ++inf)
        by_size[popcount(inf)].push_back(inf);
    auto search = [&](StateSet inf, const UpSet& frozen, Budget& local) {
        std::vector<Configuration> mine;
        if (inf && frozen.contains(Configuration{{}, inf})) return mine;
        CoveringBuilder builder(sys);
        CoveringFamily fam = builder.covering_sigma_star(inf, &local);
        FamilyAcceptor acc(fam, y);
        minimal_words(
            acc, universe,
            [&](const std::vector<Letter>& w) {
                Configuration c{w, inf};
                if (frozen.contains(c)) return true;
                for (const auto& g : mine)
                    if (leq(g, c)) return true;
                return false;
            },
            [&](const std::vector<Letter>& w) { mine.push_back(Configuration{w, inf}); }, local,
            inf == 0);
        return mine;
    };
    detail::search_in_chunks(by_size, search, z, budget, threads, stats);
    return z;
}

// ------------------------------------------------------------ size bounds

inline int word_bound_to_size(const PairSpace& ps, int words) {
    return words * ps.num_pairs() + ps.num_states;
}

// Bound on the size of ⪯_r-minimal elements of pre∀_delay(X).
inline int compute_M_delay(const RegionSystem& sys, const UpSet& x, Budget* budget = nullptr) {
    const PairSpace& ps = sys.pairs();
    const std::uint64_t universe = letter_universe_size(ps);
    CoveringBuilder b(sys);
    int best = 0;
    for (Letter l = 1; l < universe; ++l)
        for (StateSet inf = 0; inf < (StateSet{1} << ps.num_states); ++inf)
            best = std::max(best, bound_B(ps, b.covering_delay(l, inf), x, budget));
    return word_bound_to_size(ps, best + 2);
}

// Bound on the size of ⪯-minimal elements of pre∀_Σ*(Y).
inline int compute_M_sigma(const RegionSystem& sys, const UpSet& y, Budget* budget = nullptr) {
    const PairSpace& ps = sys.pairs();
    CoveringBuilder b(sys);
    int best = 0;
    for (StateSet inf = 0; inf < (StateSet{1} << ps.num_states); ++inf)
        best = std::max(best, bound_B(ps, b.covering_sigma_star(inf, budget), y, budget));
    return word_bound_to_size(ps, best + 1);
}

// ------------------------------------------------------------ fixpoint

enum class Mode { exact, capped };

struct SolverOptions {
    Mode mode = Mode::capped;
    std::uint64_t cap = 10000;                  // work units per enumeration (capped mode)
    std::uint64_t exact_budget = 200'000'000;  // total work units (exact mode)
    int max_size = 8;                           // witness search bound
    int threads = 1;
};

struct ZResult {
    UpSet z{Order::leq};
    bool exact = true;
    int iterations = 0;
    std::vector<std::size_t> generators_per_z;
    std::vector<std::size_t> generators_per_y;
    bool monotone = true;
    std::uint64_t work = 0;
    std::string note;
};

// Z_{-1} = ∅, Z_i = pre∀_Σ*(pre∀_delay(Z_{i-1}↑)) until Z_i↑ = Z_{i-1}↑.
inline ZResult z_fixpoint(const RegionSystem& sys, const SolverOptions& opt,
                          const std::function<void(const UpSet&, const UpSet&)>& on_step = {}) {
    ZResult r;
    UpSet prev(Order::leq);
    Budget total{opt.mode == Mode::exact ? opt.exact_budget : UINT64_MAX, 0};
    while (true) {
        UpSet y(Order::leq_r), z(Order::leq);
        try {
            Budget b1{opt.mode == Mode::exact ? total.limit - total.used : opt.cap, 0};
            y = pre_delay_generators(sys, prev, b1, opt.threads);
            total.charge(b1.used);
            Budget b2{opt.mode == Mode::exact ? total.limit - total.used : opt.cap, 0};
            z = pre_sigma_generators(sys, y, b2, opt.threads);
            total.charge(b2.used);
        } catch (const ResourceError& e) {
            if (opt.mode == Mode::exact) throw;
            r.exact = false;
            r.note = e.what();
            r.z = prev;
            r.work = total.used;
            return r;
        }
        ++r.iterations;
        r.generators_per_y.push_back(y.size());
        r.generators_per_z.push_back(z.size());
        if (on_step) on_step(y, z);
        if (!upset_subset(prev, z)) r.monotone = false;
        bool done = upset_subset(z, prev);
        prev = std::move(z);
        if (done) break;
    }
    r.z = std::move(prev);
    r.work = total.used;
    if (!r.monotone) throw std::logic_error("Z-chain is not monotone");
    return r;
}

// ------------------------------------------------------------ witnesses

struct LassoWitness {
    std::vector<Successor> stem;   // from the initial configuration
    std::vector<Successor> cycle;  // from the last stem configuration back to it
};

inline bool validate_witness(const RegionSystem& sys, const LassoWitness& w) {
    Configuration cur = sys.initial();
    auto step_ok = [&](const Successor& s) {
        for (const auto& [m, c] : sys.all_successors(cur))
            if (m == s.first && c == s.second) return true;
        return false;
    };
    for (const auto& s : w.stem) {
        if (!step_ok(s)) return false;
        cur = s.second;
    }
    if (w.cycle.empty()) return false;
    const Configuration start = cur;
    if (!qplus_only(sys.pairs(), start, sys.accepting())) return false;
    bool delay = false;
    for (const auto& s : w.cycle) {
        if (!step_ok(s)) return false;
        cur = s.second;
        delay |= s.first.is_delay();
        if (!qplus_only(sys.pairs(), cur, sys.accepting())) return false;
    }
    return delay && cur == start;
}

struct WitnessSearchResult {
    std::optional<LassoWitness> witness;
    std::size_t nodes = 0;
    bool truncated = false;
};

// Breadth-first exploration of configurations of size ≤ max_size, then a lasso through a
// delay edge inside a strongly connected set of Q+-only configurations.
inline WitnessSearchResult witness_search(const RegionSystem& sys, int max_size,
                                          std::size_t node_limit = 2'000'000) {
    WitnessSearchResult res;
    std::unordered_map<Configuration, int, ConfigurationHash> id;
    std::vector<Configuration> conf;
    std::vector<int> parent;
    std::vector<SigmaBarMove> parent_move;
    std::vector<std::vector<std::pair<SigmaBarMove, int>>> out;
    auto get = [&](const Configuration& c, int par, SigmaBarMove m) {
        auto [it, ins] = id.try_emplace(c, static_cast<int>(conf.size()));
        if (ins) {
            conf.push_back(c);
            parent.push_back(par);
            parent_move.push_back(m);
            out.emplace_back();
        }
        return std::make_pair(it->second, ins);
    };
    std::deque<int> queue;
    Configuration init = sys.initial();
    if (init.size() <= max_size) queue.push_back(get(init, -1, {}).first);
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (conf.size() > node_limit) {
            res.truncated = true;
            break;
        }
        for (auto& [m, c] : sys.all_successors(conf[v])) {
            if (c.size() > max_size) continue;
            auto [u, fresh] = get(c, v, m);
            out[v].push_back({m, u});
            if (fresh) queue.push_back(u);
        }
    }
    res.nodes = conf.size();
    const int n = static_cast<int>(conf.size());
    std::vector<char> good(n);
    for (int i = 0; i < n; ++i) good[i] = qplus_only(sys.pairs(), conf[i], sys.accepting());

    // Tarjan over the Q+-only subgraph (iterative)
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on(n, 0);
    std::vector<int> st;
    int counter = 0, ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (!good[s] || index[s] >= 0) continue;
        std::vector<std::pair<int, std::size_t>> call{{s, 0}};
        index[s] = low[s] = counter++;
        st.push_back(s);
        on[s] = 1;
        while (!call.empty()) {
            auto& [v, k] = call.back();
            if (k < out[v].size()) {
                int u = out[v][k++].second;
                if (!good[u]) continue;
                if (index[u] < 0) {
                    index[u] = low[u] = counter++;
                    st.push_back(u);
                    on[u] = 1;
                    call.push_back({u, 0});
                } else if (on[u]) {
                    low[v] = std::min(low[v], index[u]);
                }
            } else {
                if (low[v] == index[v]) {
                    while (true) {
                        int w = st.back();
                        st.pop_back();
                        on[w] = 0;
                        comp[w] = ncomp;
                        if (w == v) break;
                    }
                    ++ncomp;
                }
                int done = v;
                call.pop_back();
                if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            }
        }
    }
    std::vector<char> comp_ok(ncomp, 0);
    for (int v = 0; v < n; ++v)
        if (good[v])
            for (auto& [m, u] : out[v])
                if (good[u] && comp[u] == comp[v] && m.is_delay()) comp_ok[comp[v]] = 1;
    // nodes are numbered in BFS order, so the first hit has a shortest stem
    for (int v = 0; v < n; ++v) {
        if (!good[v] || !comp_ok[comp[v]]) continue;
        // shortest cycle v -> v through a delay edge inside the component
        const int c = comp[v];
        std::map<std::pair<int, int>, std::pair<std::pair<int, int>, SigmaBarMove>> prev;
        std::deque<std::pair<int, int>> q{{v, 0}};
        prev[{v, 0}] = {{-1, -1}, {}};
        std::optional<std::pair<int, int>> end;
        while (!q.empty() && !end) {
            auto [x, f] = q.front();
            q.pop_front();
            for (auto& [m, u] : out[x]) {
                if (!good[u] || comp[u] != c) continue;
                int nf = f | (m.is_delay() ? 1 : 0);
                std::pair<int, int> key{u, nf};
                if (u == v && nf == 1) {
                    prev[{-2, 0}] = {{x, f}, m};
                    end = std::make_pair(-2, 0);
                    break;
                }
                if (prev.count(key)) continue;
                prev[key] = {{x, f}, m};
                q.push_back(key);
            }
        }
        if (!end) continue;
        LassoWitness w;
        for (int x = v; parent[x] >= 0; x = parent[x]) w.stem.push_back({parent_move[x], conf[x]});
        std::reverse(w.stem.begin(), w.stem.end());
        std::vector<Successor> cyc;
        std::pair<int, int> cur = *end;
        while (true) {
            auto [from, m] = prev[cur];
            if (from.first < 0) break;
            int node = cur.first == -2 ? v : cur.first;
            cyc.push_back({m, conf[node]});
            cur = from;
            if (cur == std::make_pair(v, 0)) break;
        }
        std::reverse(cyc.begin(), cyc.end());
        w.cycle = std::move(cyc);
        res.witness = std::move(w);
        return res;
    }
    return res;
}

// ------------------------------------------------------------ verdict

struct Verdict {
    enum class Kind { nonempty, empty, unknown };
    Kind kind = Kind::unknown;
    std::optional<LassoWitness> witness;
    std::string reason;
    // stats
    int iterations = 0;
    std::vector<std::size_t> generators_per_z;
    std::size_t nodes_explored = 0;
    Mode mode = Mode::capped;
    bool exact = false;
};

class OutOfClass : public std::runtime_error {
public:
    OutOfClass(const Classification& c)
        : std::runtime_error("automaton is outside the weak (0,1) class: " + c.reason +
                             " (index (" + std::to_string(c.min_rank) + "," +
                             std::to_string(c.max_rank) + "))"),
          classification(c) {}
    Classification classification;
};

// Searches the ⪯-pruned reachability tree for a Q+-only configuration outside z.
inline std::optional<Configuration> find_good_accepting(const RegionSystem& sys, const UpSet& z,
                                                        Budget& budget, std::size_t* explored) {
    struct Node {
        Configuration c;
        int parent;
    };
    std::vector<Node> nodes{{sys.initial(), -1}};
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        budget.charge();
        if (explored) ++*explored;
        const Configuration cur = nodes[i].c;
        if (!cur.empty() && qplus_only(sys.pairs(), cur, sys.accepting()) && !z.contains(cur))
            return cur;
        bool cut = false;
        for (int p = nodes[i].parent; p >= 0 && !cut; p = nodes[p].parent) cut = leq(nodes[p].c, cur);
        if (cut) continue;
        for (auto& [m, s] : sys.all_successors(cur)) {
            nodes.push_back({std::move(s), i});
            queue.push_back(static_cast<int>(nodes.size()) - 1);
        }
    }
    return std::nullopt;
}

inline Verdict decide_emptiness(const Automaton& a, const SolverOptions& opt = {}) {
    Classification cl = classify_condition(a);
    if (!cl.weak01()) throw OutOfClass(cl);
    if (!is_normalized(a)) throw PreconditionError("automaton must be normalized");
    RegionSystem sys(a);
    Verdict v;
    v.mode = opt.mode;
    ZResult zr = z_fixpoint(sys, opt);
    v.iterations = zr.iterations;
    v.generators_per_z = zr.generators_per_z;
    v.exact = zr.exact;
    auto attach_witness = [&] {
        auto ws = witness_search(sys, opt.max_size);
        v.nodes_explored += ws.nodes;
        if (ws.witness && validate_witness(sys, *ws.witness)) v.witness = std::move(ws.witness);
    };
    if (zr.exact) {
        Budget b{opt.mode == Mode::exact ? opt.exact_budget : opt.cap, 0};
        try {
            auto hit = find_good_accepting(sys, zr.z, b, &v.nodes_explored);
            if (hit) {
                v.kind = Verdict::Kind::nonempty;
                attach_witness();
                if (!v.witness) v.reason = "no lasso witness within the size bound";
            } else {
                v.kind = Verdict::Kind::empty;
            }
            return v;
        } catch (const ResourceError& e) {
            if (opt.mode == Mode::exact) throw;
            v.exact = false;
            zr.note = e.what();
        }
    }
    attach_witness();
    if (v.witness) {
        v.kind = Verdict::Kind::nonempty;
    } else {
        v.kind = Verdict::Kind::unknown;
        v.reason = "cap reached: " + zr.note;
    }
    return v;
}

}  // namespace wata
