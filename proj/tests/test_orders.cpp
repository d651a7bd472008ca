#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace wata;

namespace {

// two states x (bit 0) and y (bit 1), d_max = 1
PairSpace micro() { return PairSpace(2, 1); }

Configuration C(std::vector<Letter> w, StateSet inf = 0) { return Configuration{std::move(w), inf}; }

}  // namespace

TEST(Leq, Examples) {
    const Letter q = 1, p = 2;
    EXPECT_TRUE(leq(C({}), C({q, p}, 3)));
    EXPECT_TRUE(leq(C({q}), C({q | p}, 1)));
    EXPECT_FALSE(leq(C({q, p}), C({q | p})));
    EXPECT_FALSE(leq(C({}, 1), C({q})));
}

TEST(LeqR, Examples) {
    const Letter q = 1, p = 2;
    EXPECT_TRUE(leq_r(C({q}), C({p, q})));
    EXPECT_FALSE(leq_r(C({}), C({q})));
    EXPECT_FALSE(leq_r(C({q}), C({q, p})));
    EXPECT_TRUE(leq(C({q}), C({q, p})));
}

TEST(Orders, GreedyMatchesBruteForce) {
    auto all = oracle::all_configurations(micro(), 5);
    std::size_t n = 0;
    for (const auto& a : all)
        for (const auto& b : all) {
            ASSERT_EQ(leq(a, b), oracle::leq(a, b)) << a.word.size() << " " << b.word.size();
            ASSERT_EQ(leq_r(a, b), oracle::leq_r(a, b));
            ++n;
        }
    EXPECT_EQ(n, all.size() * all.size());
}

TEST(Orders, ReflexiveTransitiveAndRefinement) {
    std::mt19937_64 rng(5);
    auto all = oracle::all_configurations(micro(), 3);
    auto pick = [&]() -> const Configuration& { return all[rng() % all.size()]; };
    for (const auto& c : all) {
        EXPECT_TRUE(leq(c, c));
        if (!c.word.empty()) {
            EXPECT_TRUE(leq_r(c, c));
        }
    }
    for (int i = 0; i < 20000; ++i) {
        const auto &a = pick(), &b = pick(), &c = pick();
        if (leq(a, b) && leq(b, c)) {
            EXPECT_TRUE(leq(a, c));
        }
        if (leq_r(a, b) && leq_r(b, c)) {
            EXPECT_TRUE(leq_r(a, c));
        }
        if (leq_r(a, b)) {
            EXPECT_TRUE(leq(a, b));
        }
    }
}

TEST(UpSet, AntichainMaintenance) {
    const Letter q = 1, p = 2;
    UpSet s(Order::leq);
    EXPECT_TRUE(s.insert(C({q, p})));
    EXPECT_FALSE(s.insert(C({q, q | p, p})));  // dominated
    EXPECT_EQ(s.size(), 1u);
    EXPECT_TRUE(s.insert(C({p, q})));  // incomparable
    EXPECT_EQ(s.size(), 2u);
    UpSet t = antichain_insert(s, C({}));
    EXPECT_EQ(t.size(), 1u);
    EXPECT_TRUE(t.contains(C({}, 3)));
    EXPECT_EQ(s.size(), 2u);  // value semantics
}

TEST(UpSet, EqualityAndSubset) {
    const Letter q = 1, p = 2;
    UpSet a(Order::leq), b(Order::leq), e(Order::leq);
    a.insert(C({q}));
    b.insert(C({q}));
    b.insert(C({q, p}));
    EXPECT_TRUE(upset_equal(a, a));
    EXPECT_TRUE(upset_equal(a, b));
    UpSet bottom(Order::leq);
    bottom.insert(C({}));
    EXPECT_FALSE(upset_equal(bottom, e));
    EXPECT_TRUE(upset_subset(e, a));
    EXPECT_FALSE(upset_subset(a, e));
    EXPECT_THROW(upset_equal(a, UpSet(Order::leq_r)), PreconditionError);
}

TEST(UpSet, EmptyWordFlagForRefinedOrder) {
    UpSet y(Order::leq_r);
    EXPECT_FALSE(y.contains(C({}, 1)));
    y.insert(C({}, 0));
    EXPECT_TRUE(y.empty_word_members());
    EXPECT_TRUE(y.contains(C({}, 1)));
    EXPECT_EQ(y.size(), 0u);
}

TEST(UpSet, MembershipIsUpwardClosed) {
    std::mt19937_64 rng(9);
    auto all = oracle::all_configurations(micro(), 3);
    for (Order o : {Order::leq, Order::leq_r}) {
        UpSet s(o);
        for (int i = 0; i < 4; ++i) s.insert(all[rng() % all.size()]);
        for (const auto& c : all) {
            bool brute = false;
            for (const auto& g : s.generators())
                brute |= o == Order::leq ? oracle::leq(g, c) : oracle::leq_r(g, c);
            EXPECT_EQ(s.contains(c), brute);
            if (!s.contains(c)) continue;
            for (int k = 0; k < 10; ++k) {
                const auto& d = all[rng() % all.size()];
                if (o == Order::leq ? leq(c, d) : leq_r(c, d)) {
                    EXPECT_TRUE(s.contains(d));
                }
            }
        }
        // generators form an antichain
        for (const auto& g : s.generators())
            for (const auto& h : s.generators())
                if (!(g == h)) {
                    EXPECT_FALSE(order_leq(o, g, h));
                }
    }
}

TEST(CompressedLeq, Definition) {
    Automaton a = normalize(parse_automaton("alphabet: a\nstate: x\nstate: y\ninit: x\n"));
    PairSpace ps(a);
    ExpansionFn sgl = ExpansionFn::identity(ps);
    ExpansionFn other = ExpansionFn::from_map(ps, {{1, {1, 2}}});
    CompressedConfiguration c1{{1}, sgl, 0}, c2{{2, 1}, sgl, 1}, c3{{1}, other, 0};
    EXPECT_TRUE(compressed_leq(c1, c1));
    EXPECT_TRUE(compressed_leq(c1, c2));
    EXPECT_FALSE(compressed_leq(c2, c1));
    EXPECT_FALSE(compressed_leq(c1, c3));
    CompressedConfiguration e1{{}, sgl, 0};
    EXPECT_TRUE(compressed_leq(e1, e1));
}

// If c' ⪯ c and c moves to c2, then c' reaches some c2' ⪯ c2 in at most one step.
TEST(Orders, SimulationCompatibility) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Automaton a = random_ata(seed, {2, 1, 1, 0.5, 2});
        RegionSystem sys(a);
        auto all = oracle::all_configurations(sys.pairs(), 2);
        std::mt19937_64 rng(seed);
        int checked = 0;
        for (int i = 0; i < 20000 && checked < 200; ++i) {
            const auto& c = all[rng() % all.size()];
            const auto& cs = all[rng() % all.size()];
            if (!leq(cs, c) || (cs.word.empty() && cs.inf == 0)) continue;
            ++checked;
            auto small = sys.all_successors(cs);
            for (const auto& [m, c2] : sys.all_successors(c)) {
                bool ok = leq(cs, c2);
                for (const auto& [m2, s2] : small) ok = ok || leq(s2, c2);
                EXPECT_TRUE(ok) << dump(a, cs) << " vs " << dump(a, c) << " --" << move_text(a, m) << "--> "
                                << dump(a, c2);
            }
        }
    }
}
