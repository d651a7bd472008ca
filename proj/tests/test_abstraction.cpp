#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace wata;

namespace {

const char* kA1 = R"(alphabet: a
state: q rank=0
init: q
trans: q , a , "x>=0" -> (q,nop)&(q,reset)
)";

Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

Automaton with_dmax(const char* text, int d) {
    Automaton a = normalize(parse_automaton(text));
    return Automaton(a.states, a.alphabet, a.initial, a.rules, d);
}

}  // namespace

TEST(HOf, GroupsByFractionalPart) {
    Automaton a = with_dmax(R"(alphabet: a
state: q
state: q2
state: q3
state: p
init: q
)", 2);
    PairSpace ps(a);
    ConcreteConfig p{{0, R(1, 2)}, {2, R(1, 2)}, {1, R(3, 2)}, {3, R(7)}};
    Configuration c = h_of(a, p);
    ASSERT_EQ(c.word.size(), 1u);
    EXPECT_EQ(c.word[0], ps.pair(0, 1) | ps.pair(2, 1) | ps.pair(1, 2));
    EXPECT_EQ(c.inf, StateSet{1} << 3);
    EXPECT_EQ(h_of(a, {}), Configuration{});
}

TEST(HOf, StartConfiguration) {
    Automaton a = normalize(parse_automaton(kA1));
    RegionSystem sys(a);
    EXPECT_EQ(h_of(a, {{0, R(1, 2)}}), sys.initial());
    EXPECT_EQ(dump(a, sys.initial()), "[{q:I1}] inf={}");
}

TEST(DelayEps, Examples) {
    Automaton a1 = normalize(parse_automaton(kA1));
    RegionSystem s1(a1);
    auto c = parse_configuration(a1, "[{q:I1}] inf={}");
    EXPECT_EQ(s1.delay_eps(c), parse_configuration(a1, "[] inf={q}"));
    EXPECT_EQ(s1.delay_eps(parse_configuration(a1, "[] inf={q}")), std::nullopt);

    Automaton a2 = with_dmax(kA1, 2);
    RegionSystem s2(a2);
    EXPECT_EQ(s2.delay_eps(parse_configuration(a2, "[{q:I1}] inf={}")),
              parse_configuration(a2, "[{q:I2}] inf={}"));
    // rotation: the raised last letter moves to the front
    EXPECT_EQ(s2.delay_eps(parse_configuration(a2, "[{q:I2} {q:I1}] inf={}")),
              parse_configuration(a2, "[{q:I2} {q:I2}] inf={}"));
}

TEST(ActSuccessors, Examples) {
    Automaton a = normalize(parse_automaton(kA1));
    RegionSystem sys(a);
    auto s = sys.act_successors(parse_configuration(a, "[{q:I1}] inf={}"), 0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(dump(a, s[0]), "[{q:I1} {q:I1}] inf={}");
    s = sys.act_successors(parse_configuration(a, "[] inf={q}"), 0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(dump(a, s[0]), "[{q:I1}] inf={q}");
    EXPECT_TRUE(sys.act_successors(Configuration{}, 0).empty());
}

TEST(ActSuccessors, BlockedAndBranching) {
    Automaton a = normalize(parse_automaton(R"(alphabet: a b
state: p
state: q
init: p
trans: p , a , "true" -> (p,nop)&(q,reset) | (q,nop)&(p,reset)
)"));
    RegionSystem sys(a);
    auto c = parse_configuration(a, "[{p:I1}] inf={}");
    EXPECT_EQ(sys.act_successors(c, 0).size(), 2u);
    EXPECT_TRUE(sys.act_successors(c, 1).empty());
    EXPECT_TRUE(sys.act_successors(parse_configuration(a, "[{p:I1,q:I1}] inf={}"), 0).empty());
}

TEST(DelayActSuccessors, Examples) {
    Automaton a = normalize(parse_automaton(kA1));
    RegionSystem sys(a);
    auto s = sys.delay_act_successors(parse_configuration(a, "[{q:I1}] inf={}"), 0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(dump(a, s[0]), "[{q:I1}] inf={q}");
    EXPECT_THROW(sys.delay_act_successors(Configuration{}, 0), PreconditionError);

    Automaton eq = normalize(parse_automaton(R"(alphabet: a
state: q
init: q
trans: q , a , "x=1" -> (q,nop)&(q,reset)
)"));
    RegionSystem se(eq);
    auto c = parse_configuration(eq, "[{q:I1}] inf={}");
    s = se.delay_act_successors(c, 0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(dump(eq, s[0]), "[{q:I1}] inf={q}");
    // the equality guard only fires on the point region
    EXPECT_TRUE(se.act_successors(c, 0).empty());
}

TEST(AllSuccessors, Examples) {
    Automaton a = normalize(parse_automaton(kA1));
    RegionSystem sys(a);
    std::set<std::string> got;
    for (const auto& [m, c] : sys.all_successors(sys.initial())) got.insert(move_text(a, m) + " " + dump(a, c));
    EXPECT_EQ(got, (std::set<std::string>{"delay [] inf={q}", "a [{q:I1} {q:I1}] inf={}",
                                         "delay,a [{q:I1}] inf={q}"}));
    EXPECT_TRUE(sys.all_successors(Configuration{}).empty());

    Automaton a0 = normalize(parse_automaton("alphabet: a\nstate: q\ninit: q\n"));
    RegionSystem s0(a0);
    auto succ = s0.all_successors(s0.initial());
    ASSERT_EQ(succ.size(), 1u);
    EXPECT_TRUE(succ[0].first.is_delay());
    EXPECT_EQ(dump(a0, succ[0].second), "[] inf={q}");
}

TEST(Abstraction, ConfigurationTextRoundTrip) {
    Automaton a = with_dmax(R"(alphabet: a
state: p
state: q
init: p
)", 2);
    for (const char* t : {"[] inf={}", "[{p:I1,q:I2} {q:I1}] inf={p}", "[{q:I2}] inf={p,q}"})
        EXPECT_EQ(dump(a, parse_configuration(a, t)), t);
    EXPECT_THROW(parse_configuration(a, "[{r:I1}] inf={}"), ParseError);
    EXPECT_THROW(parse_configuration(a, "[{p:I3}] inf={}"), ParseError);
}

TEST(Abstraction, SuccessorShapeInvariants) {
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Automaton a = random_ata(seed, {3, 2, 2, 0.5, 2});
        RegionSystem sys(a);
        const PairSpace& ps = sys.pairs();
        for (int k = 0; k < 20; ++k) {
            Configuration c = h_of(a, oracle::random_concrete(rng, a));
            auto d = sys.delay_eps(c);
            if (d) EXPECT_TRUE(d->word.size() == c.word.size() || d->word.size() + 1 == c.word.size());
            else EXPECT_TRUE(c.word.empty());
            for (ActionId x = 0; x < a.num_letters(); ++x)
                for (const auto& s : sys.act_successors(c, x)) {
                    EXPECT_EQ(s.word.size(), c.word.size() + 1);
                    EXPECT_NE(s.word.front(), 0u);
                }
            for (const auto& [m, s] : sys.all_successors(c))
                for (Letter l : s.word) {
                    EXPECT_NE(l, 0u);
                    EXPECT_EQ(l & ~ps.all_pairs(), 0u);
                }
        }
    }
}

// Images under H of concrete successors equal the abstract successors of the image.
TEST(Abstraction, HCommutation) {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        RandomAtaParams prm{1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2),
                            1 + static_cast<int>(rng() % 2), 0.5, 2};
        Automaton a = random_ata(rng(), prm);
        RegionSystem sys(a);
        ConcreteConfig p = oracle::random_concrete(rng, a);
        ActionId x = static_cast<ActionId>(rng() % a.num_letters());
        for (SigmaBarMove m : {SigmaBarMove::act(x), SigmaBarMove::delay_eps(), SigmaBarMove::delay_act(x)}) {
            auto conc = oracle::concrete_move(a, p, m);
            auto abs = oracle::abstract_move(sys, h_of(a, p), m);
            if (!conc) {
                EXPECT_TRUE(abs.empty());
                continue;
            }
            EXPECT_EQ(oracle::h_image(a, *conc), abs)
                << to_text(a) << concrete_text(a, p) << " " << move_text(a, m);
            ++checked;
        }
    }
    EXPECT_GT(checked, 800);
}

// Several clocks of one state above d_max share the pair (q,I_inf) and may pick different
// disjuncts concretely; those successors dominate one where a single disjunct is picked.
TEST(Abstraction, RepeatedInfClocksAreDominated) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 300; ++i) {
        RandomAtaParams prm{1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2),
                            1 + static_cast<int>(rng() % 2), 0.5, 2};
        Automaton a = random_ata(rng(), prm);
        RegionSystem sys(a);
        ConcreteConfig p = oracle::random_concrete(rng, a, 5, true);
        ActionId x = static_cast<ActionId>(rng() % a.num_letters());
        for (SigmaBarMove m : {SigmaBarMove::act(x), SigmaBarMove::delay_eps(), SigmaBarMove::delay_act(x)}) {
            auto conc = oracle::concrete_move(a, p, m);
            if (!conc) continue;
            auto abs = oracle::abstract_move(sys, h_of(a, p), m);
            auto img = oracle::h_image(a, *conc);
            for (const auto& c : abs) EXPECT_TRUE(img.count(c)) << dump(a, c);
            for (const auto& c : img) {
                bool dominated = false;
                for (const auto& d : abs) dominated |= oracle::leq(d, c);
                EXPECT_TRUE(dominated) << dump(a, c);
            }
        }
    }
}
