#include "wata/wata.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace wata;

namespace {

std::string read_sample(const std::string& name) {
    std::ifstream in(std::string(WATA_SAMPLES_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kA1 = R"(alphabet: a
state: q rank=0
init: q
trans: q , a , "x>=0" -> (q,nop)&(q,reset)
)";

}  // namespace

TEST(Parse, FixtureA1) {
    Automaton a = parse_automaton(read_sample("a1.ata"));
    EXPECT_EQ(a.num_states(), 1);
    EXPECT_EQ(a.alphabet, std::vector<std::string>{"a"});
    EXPECT_EQ(a.rank(0), 0);
    ASSERT_EQ(a.rules.size(), 1u);
    EXPECT_EQ(a.rules[0].guard.text(), "x>=0");
    ASSERT_EQ(a.rules[0].formula.size(), 1u);
    EXPECT_EQ(a.rules[0].formula[0].size(), 2u);
    EXPECT_EQ(a.d_max, 1);
}

TEST(Parse, RoundTrip) {
    const char* text = R"(alphabet: a b
state: p rank=1
state: q
init: p
trans: p , a , "x>0 & x<2" -> (q,reset)&(p,nop) | true
trans: q , b , "x!=1" -> false
)";
    Automaton a = parse_automaton(text);
    Automaton b = parse_automaton(to_text(a));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.d_max, 2);
}

TEST(Parse, ErrorsCarryPosition) {
    try {
        parse_automaton("alphabet: a\nstate: q\ninit: q\ntrans: q , a , \"x>0\" -> (r,nop)\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4);
        EXPECT_GT(e.column(), 1);
        EXPECT_NE(e.message().find("unknown state 'r'"), std::string::npos);
    }
    EXPECT_THROW(parse_automaton("alphabet: a\nstate: q\n"), ParseError);
    EXPECT_THROW(parse_automaton("alphabet: a\nstate: q\ninit: z\n"), ParseError);
    EXPECT_THROW(parse_automaton("alphabet: a\nstate: q\nstate: q\ninit: q\n"), ParseError);
    EXPECT_THROW(parse_automaton("alphabet: a\nstate: q_top\ninit: q_top\n"), ParseError);
    EXPECT_THROW(parse_automaton("alphabet: a\nstate: q\ninit: q\ntrans: q , b , \"true\" -> true\n"), ParseError);
    EXPECT_THROW(parse_automaton("alphabet: a\nstate: q\ninit: q\nbogus\n"), ParseError);
}

TEST(Normalize, PadsDisjunctsWithTop) {
    Automaton a = parse_automaton("alphabet: a\nstate: q\ninit: q\ntrans: q , a , \"true\" -> (q,nop)\n");
    Automaton n = normalize(a);
    ASSERT_TRUE(n.state_index(kTopName));
    StateId top = *n.state_index(kTopName);
    EXPECT_TRUE(is_normalized(n));
    for (const auto& r : n.rules)
        if (r.source == 0) {
            ASSERT_EQ(r.formula.size(), 1u);
            EXPECT_EQ(r.formula[0], (Disjunct{Atom::of(0, false), Atom::of(top, true)}));
        }
}

TEST(Normalize, AlreadyPaddedNeedsNoTop) {
    Automaton n = normalize(parse_automaton(kA1));
    EXPECT_FALSE(n.state_index(kTopName));
    EXPECT_TRUE(is_normalized(n));
}

TEST(Normalize, FalseBecomesBlockedState) {
    Automaton n = normalize(parse_automaton("alphabet: a\nstate: q\ninit: q\ntrans: q , a , \"true\" -> false\n"));
    auto bot = n.state_index(kBotName);
    ASSERT_TRUE(bot);
    for (const auto& r : n.rules) EXPECT_NE(r.source, *bot);
}

TEST(Normalize, OverlapIsUnion) {
    Automaton a = parse_automaton(R"(alphabet: a
state: p
state: q
init: p
trans: p , a , "x<=1" -> (p,nop)&(p,reset)
trans: p , a , "x>=1" -> (q,nop)&(q,reset)
)");
    Automaton n = normalize(a);
    EXPECT_TRUE(is_normalized(n));
    // on the point {1} both disjuncts are available
    auto at_one = n.enabled(0, 0, Region::point(1));
    ASSERT_EQ(at_one.size(), 1u);
    EXPECT_EQ(n.rules[at_one[0]].formula.size(), 2u);
    auto below = n.enabled(0, 0, Region::interval(1));
    ASSERT_EQ(below.size(), 1u);
    EXPECT_EQ(n.rules[below[0]].formula.size(), 1u);
}

TEST(Normalize, MergesContiguousRegions) {
    Automaton a = parse_automaton(R"(alphabet: a
state: p
init: p
trans: p , a , "x<1" -> (p,nop)&(p,reset)
trans: p , a , "x>1" -> (p,nop)&(p,reset)
)");
    Automaton n = normalize(a);
    ASSERT_EQ(n.rules.size(), 2u);
    EXPECT_EQ(n.rules[0].guard.text(), "x<1");
    EXPECT_EQ(n.rules[1].guard.text(), "x>1");
    EXPECT_TRUE(n.enabled(0, 0, Region::point(1)).empty());
}

TEST(Normalize, DmaxAtLeastOne) {
    Automaton a = parse_automaton("alphabet: a\nstate: q\ninit: q\ntrans: q , a , \"x=0\" -> true\n");
    EXPECT_EQ(normalize(a).d_max, 1);
}

TEST(Normalize, Idempotent) {
    Automaton a = parse_automaton(R"(alphabet: a b
state: p rank=1
state: q
init: p
trans: p , a , "x>0 & x<2" -> (q,reset) | true
trans: p , a , "x>=1" -> (p,nop)
trans: q , b , "x!=1" -> (q,nop)&(q,reset)
)");
    Automaton n = normalize(a);
    EXPECT_EQ(normalize(n), n);
}

TEST(Classify, Weak01AndOutOfClass) {
    EXPECT_TRUE(classify_condition(parse_automaton(kA1)).weak01());
    Automaton bad = parse_automaton(R"(alphabet: a
state: p rank=0
state: q rank=1
init: p
trans: p , a , "true" -> (q,nop)
)");
    auto c = classify_condition(bad);
    EXPECT_FALSE(c.weak01());
    EXPECT_EQ(c.min_rank, 0);
    EXPECT_EQ(c.max_rank, 1);
    Automaton high = parse_automaton("alphabet: a\nstate: q rank=2\ninit: q\n");
    EXPECT_FALSE(classify_condition(high).weak01());
    Automaton ok = parse_automaton(R"(alphabet: a
state: p rank=1
state: q rank=0
init: p
trans: p , a , "true" -> (q,nop)
)");
    EXPECT_TRUE(classify_condition(ok).weak01());
}

TEST(Classify, NormalizeKeepsClass) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        Automaton a = random_ata(s, {3, 2, 2, 0.5, 2});
        EXPECT_TRUE(classify_condition(a).weak01()) << s;
        EXPECT_TRUE(is_normalized(a)) << s;
    }
}

TEST(Guard, RegionEvaluation) {
    Guard g{{{Cmp::gt, 0}, {Cmp::lt, 1}}};
    EXPECT_FALSE(guard_sat_region(g, Region::point(0), 1));
    EXPECT_TRUE(guard_sat_region(g, Region::interval(1), 1));
    EXPECT_FALSE(guard_sat_region(g, Region::point(1), 1));
    EXPECT_THROW(guard_sat_region(Guard{{{Cmp::eq, 3}}}, Region::point(0), 1), PreconditionError);
}
