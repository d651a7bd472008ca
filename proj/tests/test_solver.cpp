#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace wata;

namespace {

Automaton sample(const std::string& name) {
    std::ifstream in(std::string(WATA_SAMPLES_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return normalize(parse_automaton(ss.str()));
}

SolverOptions exact() {
    SolverOptions o;
    o.mode = Mode::exact;
    return o;
}

std::set<Configuration> gens_up_to(const UpSet& u, int size) {
    std::set<Configuration> out;
    for (const auto& g : u.generators())
        if (g.size() <= size) out.insert(g);
    return out;
}

UpSet random_upset(std::mt19937_64& rng, const PairSpace& ps, Order o) {
    auto all = oracle::all_configurations(ps, 2);
    UpSet x(o);
    for (int k = static_cast<int>(rng() % 4); k > 0; --k) {
        const auto& c = all[rng() % all.size()];
        if (o == Order::leq_r && c.word.empty()) continue;
        x.insert(c);
    }
    return x;
}

}  // namespace

TEST(PreDelayMember, Examples) {
    Automaton a1 = sample("a1.ata");
    RegionSystem sys(a1);
    UpSet none(Order::leq), all(Order::leq);
    all.insert(Configuration{});
    EXPECT_TRUE(pre_delay_member(sys, {{}, 1}, none));
    EXPECT_FALSE(pre_delay_member(sys, sys.initial(), none));
    EXPECT_TRUE(pre_delay_member(sys, sys.initial(), all));
}

TEST(PreSigmaMember, Examples) {
    Automaton a1 = sample("a1.ata");
    RegionSystem sys(a1);
    UpSet all(Order::leq_r), none(Order::leq_r);
    all.set_empty_word_members(true);
    for (Letter l = 1; l <= sys.pairs().all_pairs(); ++l)
        if (popcount(l) == 1) all.insert(Configuration{{l}, 0});
    EXPECT_TRUE(pre_sigma_member(sys, sys.initial(), all));
    EXPECT_FALSE(pre_sigma_member(sys, sys.initial(), none));
}

// The pruned tree agrees with plain bounded reachability on micro automata.
TEST(PreSigmaMember, AgreesWithBoundedReachability) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        Automaton a = random_ata(seed, {2, 1, 1, 0.5, 2});
        RegionSystem sys(a);
        const PairSpace& ps = sys.pairs();
        auto all = oracle::all_configurations(ps, 2);
        for (int k = 0; k < 20; ++k) {
            UpSet y = random_upset(rng, ps, Order::leq_r);
            y.set_empty_word_members(rng() % 2);
            const auto& c = all[rng() % all.size()];
            bool oracle_ok = true;
            for (const auto& r : oracle::sigma_reach(sys, c, 6)) oracle_ok &= y.contains(r);
            EXPECT_EQ(pre_sigma_member(sys, c, y), oracle_ok) << dump(a, c);
        }
    }
}

TEST(EnumerateMinGenerators, Examples) {
    PairSpace ps(2, 1);
    auto t = enumerate_min_generators(ps, [](const Configuration&) { return true; }, Order::leq, 3);
    EXPECT_TRUE(t.exact);
    EXPECT_EQ(t.generators.generators(), std::vector<Configuration>{Configuration{}});
    auto tr = enumerate_min_generators(ps, [](const Configuration&) { return true; }, Order::leq_r, 3);
    EXPECT_EQ(gens_up_to(tr.generators, 9),
              (std::set<Configuration>{{{1}, 0}, {{2}, 0}}));
    auto f = enumerate_min_generators(ps, [](const Configuration&) { return false; }, Order::leq, 3);
    EXPECT_TRUE(f.exact);
    EXPECT_EQ(f.generators.size(), 0u);
    auto nonempty = enumerate_min_generators(
        ps, [](const Configuration& c) { return !c.word.empty(); }, Order::leq, 3);
    EXPECT_EQ(gens_up_to(nonempty.generators, 9), (std::set<Configuration>{{{1}, 0}, {{2}, 0}}));
    auto capped = enumerate_min_generators(ps, [](const Configuration&) { return false; }, Order::leq, 3, 5);
    EXPECT_FALSE(capped.exact);
}

// The acceptor-based searches return the same minimal elements as brute-force enumeration
// over the membership predicates, up to a size bound.
TEST(Generators, MatchEnumerationOnMicroAutomata) {
    std::mt19937_64 rng(11);
    const int bound = 3;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        Automaton a = random_ata(seed, {2, 1, 1, 0.5, 2});
        RegionSystem sys(a);
        const PairSpace& ps = sys.pairs();
        UpSet x = random_upset(rng, ps, Order::leq);
        Budget b1;
        UpSet y = pre_delay_generators(sys, x, b1);
        auto ey = enumerate_min_generators(
            ps, [&](const Configuration& c) { return pre_delay_member(sys, c, x); }, Order::leq_r, bound);
        EXPECT_EQ(gens_up_to(y, bound), gens_up_to(ey.generators, bound)) << to_text(a);
        Budget b2;
        UpSet z = pre_sigma_generators(sys, y, b2);
        auto ez = enumerate_min_generators(
            ps,
            [&](const Configuration& c) {
                return !(c.word.empty() && c.inf == 0) && pre_sigma_member(sys, c, y);
            },
            Order::leq, bound);
        EXPECT_EQ(gens_up_to(z, bound), gens_up_to(ez.generators, bound)) << to_text(a);
    }
}

TEST(Bounds, CoverEnumeratedGenerators) {
    std::mt19937_64 rng(13);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Automaton a = random_ata(seed, {2, 1, 1, 0.5, 2});
        RegionSystem sys(a);
        UpSet x = random_upset(rng, sys.pairs(), Order::leq);
        Budget b;
        UpSet y = pre_delay_generators(sys, x, b);
        int md = compute_M_delay(sys, x);
        for (const auto& g : y.generators()) EXPECT_LE(g.size(), md);
        UpSet z = pre_sigma_generators(sys, y, b);
        int ms = compute_M_sigma(sys, y);
        for (const auto& g : z.generators()) EXPECT_LE(g.size(), ms);
    }
    Automaton a0 = sample("a0.ata");
    RegionSystem s0(a0);
    UpSet none(Order::leq);
    Budget b;
    UpSet y0 = pre_delay_generators(s0, none, b);
    for (const auto& g : y0.generators()) EXPECT_LE(g.size(), compute_M_delay(s0, none));
}

TEST(ZFixpoint, Fixtures) {
    Automaton a0 = sample("a0.ata"), a1 = sample("a1.ata"), a2 = sample("a2.ata");
    RegionSystem s0(a0), s1(a1), s2(a2);
    auto z0 = z_fixpoint(s0, exact());
    auto z1 = z_fixpoint(s1, exact());
    auto z2 = z_fixpoint(s2, exact());
    EXPECT_TRUE(z0.exact && z1.exact && z2.exact);
    EXPECT_TRUE(z0.z.contains(s0.initial()));
    EXPECT_FALSE(z1.z.contains(s1.initial()));
    EXPECT_FALSE(z2.z.contains(s2.initial()));
    EXPECT_TRUE(upset_equal(z1.z, z2.z));
}

TEST(ZFixpoint, ChainIsMonotone) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Automaton a = random_ata(seed, {2, 1, 1, 0.5, 2});
        RegionSystem sys(a);
        UpSet prev(Order::leq);
        bool ok = true;
        auto r = z_fixpoint(sys, exact(), [&](const UpSet&, const UpSet& z) {
            ok &= upset_subset(prev, z);
            prev = z;
        });
        EXPECT_TRUE(ok);
        EXPECT_TRUE(r.monotone);
        EXPECT_TRUE(upset_equal(prev, r.z));
    }
}

TEST(ZFixpoint, ThreadCountDoesNotChangeResults) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Automaton a = random_ata(seed, {3, 1, 1, 0.5, 2});
        RegionSystem sys(a);
        SolverOptions one = exact(), four = exact();
        four.threads = 4;
        auto r1 = z_fixpoint(sys, one);
        auto r4 = z_fixpoint(sys, four);
        EXPECT_EQ(r1.generators_per_z, r4.generators_per_z);
        EXPECT_EQ(r1.work, r4.work);
        EXPECT_EQ(r1.z.sorted_generators(), r4.z.sorted_generators());
    }
}

TEST(WitnessSearch, Fixtures) {
    Automaton a0 = sample("a0.ata"), a1 = sample("a1.ata"), a2 = sample("a2.ata");
    RegionSystem s0(a0), s1(a1), s2(a2);
    auto w1 = witness_search(s1, 4);
    ASSERT_TRUE(w1.witness);
    EXPECT_TRUE(validate_witness(s1, *w1.witness));
    EXPECT_FALSE(witness_search(s2, 6).witness);
    EXPECT_FALSE(witness_search(s0, 6).witness);
}

TEST(ValidateWitness, RejectsBrokenLassos) {
    Automaton a1 = sample("a1.ata");
    RegionSystem sys(a1);
    auto w = witness_search(sys, 4).witness;
    ASSERT_TRUE(w);
    LassoWitness no_cycle = *w;
    no_cycle.cycle.clear();
    EXPECT_FALSE(validate_witness(sys, no_cycle));
    LassoWitness wrong = *w;
    wrong.cycle.back().second.inf ^= 1;
    EXPECT_FALSE(validate_witness(sys, wrong));
    LassoWitness no_delay = *w;
    std::erase_if(no_delay.cycle, [](const Successor& s) { return s.first.is_delay(); });
    EXPECT_FALSE(validate_witness(sys, no_delay));
}

TEST(DecideEmptiness, Fixtures) {
    auto v0 = decide_emptiness(sample("a0.ata"), exact());
    auto v1 = decide_emptiness(sample("a1.ata"), exact());
    auto v2 = decide_emptiness(sample("a2.ata"), exact());
    EXPECT_EQ(v0.kind, Verdict::Kind::empty);
    EXPECT_EQ(v1.kind, Verdict::Kind::nonempty);
    EXPECT_EQ(v2.kind, Verdict::Kind::empty);
    ASSERT_TRUE(v1.witness);
    EXPECT_TRUE(v0.exact && v1.exact && v2.exact);
}

TEST(DecideEmptiness, Preconditions) {
    Automaton raw = parse_automaton(R"(alphabet: a
state: q rank=0
init: q
trans: q , a , "x<1" -> (q,nop)
)");
    ASSERT_FALSE(is_normalized(raw));
    EXPECT_THROW(decide_emptiness(raw), PreconditionError);
    Automaton bad = normalize(parse_automaton(R"(alphabet: a
state: q rank=2
init: q
trans: q , a , "x>=0" -> (q,nop)
)"));
    EXPECT_THROW(decide_emptiness(bad), OutOfClass);
}

TEST(DecideEmptiness, CappedModeReportsUnknown) {
    SolverOptions o;
    o.cap = 0;
    auto v = decide_emptiness(sample("a2.ata"), o);
    EXPECT_EQ(v.kind, Verdict::Kind::unknown);
    EXPECT_FALSE(v.exact);
    EXPECT_NE(v.reason.find("cap"), std::string::npos);
    // a witness still settles it
    auto v1 = decide_emptiness(sample("a1.ata"), o);
    EXPECT_EQ(v1.kind, Verdict::Kind::nonempty);
}

// Exact NONEMPTY implies a bounded lasso exists on micro automata, and a lasso implies NONEMPTY.
TEST(DecideEmptiness, AgreesWithWitnessSearch) {
    int nonempty = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Automaton a = random_ata(seed, {2, 1, 1, 0.5, 2});
        RegionSystem sys(a);
        auto v = decide_emptiness(a, exact());
        auto w = witness_search(sys, 6);
        bool lasso = w.witness && validate_witness(sys, *w.witness);
        EXPECT_EQ(v.kind == Verdict::Kind::nonempty, lasso) << to_text(a);
        nonempty += lasso;
    }
    EXPECT_GT(nonempty, 0);
}
