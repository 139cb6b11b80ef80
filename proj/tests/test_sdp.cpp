#include "support.hpp"
#include "xsdp/domlang.hpp"
#include "xsdp/sdp.hpp"

#include <gtest/gtest.h>

using namespace xsdp;
using xsdp::testing::domain_path;
using xsdp::testing::oracle_value;
using xsdp::testing::q;
using xsdp::testing::state;

namespace {

Dcmdp knapsack() { return load_domain(domain_path("knapsack.dcmdp")); }
Dcmdp rover1() { return load_domain(domain_path("rover_nonlinear_k1.dcmdp")); }

Assignment rover_state(const Dcmdp& m, Rational x, Rational y, bool h) {
  Assignment s = state(m, {{"x", x}, {"y", y}});
  s.set_bool(*m.vars().find("h1"), h);
  return s;
}

SolveResult run(const Dcmdp& m, std::size_t h, bool prune = false) {
  SolveOptions o;
  o.horizon = h;
  o.prune = prune;
  return solve(m, o);
}

}  // namespace

TEST(Regress, KnapsackFromZeroIsTheReward) {
  Dcmdp m = knapsack();
  NodeRef qa = regress(m, *m.find_action("move_1"), m.store->zero());
  EXPECT_EQ(qa, m.find_action("move_1")->reward);
  EXPECT_EQ(to_case(*m.store, qa), "k + x1 > 100 : 0\nk + x1 <= 100 : x1\n");
}

TEST(Regress, IdentityDynamicsReturnTheValue) {
  Dcmdp m = parse_domain(
      "domain id cvar a [0, 5] cvar b [-1, 1] bvar f action stay { } discount 1");
  NodeRef v = parse_case(*m.store, "([f] ([a + b > 2] (a * b) (3)) ([a^2 < 2] (b) (1 - a)))");
  NodeRef qa = regress(m, m.actions[0], v);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    Assignment s = random_state(m, rng);
    EXPECT_EQ(m.store->evaluate(qa, s), m.store->evaluate(v, s));
  }
}

TEST(Regress, RoverMoveScalesTheValue) {
  Dcmdp m = rover1();
  NodeRef v = m.find_action("take_pic_1")->reward;
  NodeRef qa = regress(m, *m.find_action("move"), v);
  EXPECT_EQ(m.store->evaluate(qa, rover_state(m, q(12, 5), 0, false)), q(36, 25));
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    Assignment s = random_state(m, rng);
    s.set_bool(*m.vars().find("h1"), false);
    const Rational r2 = q(4, 9) * (s.at(*m.vars().find("x")) * s.at(*m.vars().find("x")) +
                                   s.at(*m.vars().find("y")) * s.at(*m.vars().find("y")));
    EXPECT_EQ(m.store->evaluate(qa, s), r2 < 4 ? Rational(4 - r2) : Rational(0));
  }
}

TEST(Regress, RejectsPrimedValue) {
  Dcmdp m = knapsack();
  NodeRef v = m.store->terminal(Polynomial::variable(m.vars().primed(*m.vars().find("k"))));
  EXPECT_THROW(regress(m, m.actions[0], v), Error);
}

TEST(Regress, DiscreteMarginalizationMatchesExplicitSum) {
  Dcmdp m = parse_domain(xsdp::testing::kToyDomain);
  NodeRef v = parse_case(*m.store, xsdp::testing::kToyValue);
  NodeRef qa = regress(m, m.actions[0], v);
  for (VarId u : m.store->support(qa)) EXPECT_FALSE(m.vars().is_primed(u));
  const VarId x = *m.vars().find("x"), b1 = *m.vars().find("b1"), b2 = *m.vars().find("b2");
  for (long n = 0; n <= 100; ++n)
    for (bool c1 : {true, false})
      for (bool c2 : {true, false}) {
        Assignment s;
        s.set(x, q(n, 10));
        s.set_bool(b1, c1);
        s.set_bool(b2, c2);
        ASSERT_EQ(m.store->evaluate(qa, s), xsdp::testing::toy_q(c1, c2, q(n, 10))) << n << c1 << c2;
      }
}

TEST(Backup, SingleActionIsItsQ) {
  Dcmdp m = parse_domain(xsdp::testing::kToyDomain);
  NodeRef v = parse_case(*m.store, xsdp::testing::kToyValue);
  Backup b = backup(m, v, false);
  ASSERT_EQ(b.q.size(), 1u);
  EXPECT_EQ(b.value, b.q[0]);
}

TEST(Backup, KnapsackFirstStepIsMaxOfRewards) {
  Dcmdp m = knapsack();
  Backup b = backup(m, m.store->zero(), false);
  std::mt19937_64 rng(12);
  const VarId k = *m.vars().find("k"), x1 = *m.vars().find("x1"), x2 = *m.vars().find("x2");
  for (int i = 0; i < 1000; ++i) {
    Assignment s = random_state(m, rng);
    const Rational r1 = s.at(k) + s.at(x1) <= 100 ? s.at(x1) : Rational(0);
    const Rational r2 = s.at(k) + s.at(x2) <= 100 ? s.at(x2) : Rational(0);
    ASSERT_EQ(m.store->evaluate(b.value, s), r1 > r2 ? r1 : r2);
  }
}

TEST(Solve, ZeroHorizon) {
  Dcmdp m = knapsack();
  SolveResult r = run(m, 0);
  ASSERT_EQ(r.iterations.size(), 1u);
  EXPECT_EQ(r.at(0).value, m.store->zero());
  EXPECT_EQ(r.final_horizon, 0u);
}

TEST(Solve, RewardInitialization) {
  Dcmdp m = knapsack();
  SolveOptions o;
  o.reward_init = true;
  SolveResult r = solve(m, o);
  EXPECT_EQ(m.store->evaluate(r.at(0).value, state(m, {{"k", 0}, {"x1", 30}, {"x2", 40}})), 40);
}

TEST(Solve, KnapsackConvergesAtThree) {
  Dcmdp m = knapsack();
  SolveResult r = run(m, 3);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.final_horizon, 3u);
  EXPECT_EQ(r.at(3).value, r.at(2).value);
  EXPECT_EQ(value_at(m, r, 2, state(m, {{"k", 0}, {"x1", 30}, {"x2", 40}})), 70);
  EXPECT_EQ(value_at(m, r, 2, state(m, {{"k", 50}, {"x1", 60}, {"x2", 70}})), 0);
  EXPECT_EQ(value_at(m, r, 2, state(m, {{"k", 0}, {"x1", 60}, {"x2", 70}})), 70);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    Assignment s = random_state(m, rng);
    const Rational v = value_at(m, r, 2, s);
    ASSERT_EQ(v, xsdp::testing::knapsack_closed_form(s.at(*m.vars().find("k")), s.at(*m.vars().find("x1")),
                                             s.at(*m.vars().find("x2"))));
    ASSERT_EQ(v, oracle_value(m, s, 2));
  }
}

TEST(Solve, RoverNonlinearSpotValues) {
  Dcmdp m = rover1();
  SolveResult r = run(m, 2);
  EXPECT_EQ(value_at(m, r, 1, rover_state(m, 1, 1, false)), 2);
  // moving first reaches radius^2 8/9: 4 - 8/9
  EXPECT_EQ(value_at(m, r, 2, rover_state(m, 1, 1, false)), q(28, 9));
  EXPECT_EQ(oracle_value(m, rover_state(m, 1, 1, false), 2), q(28, 9));
  EXPECT_EQ(value_at(m, r, 2, rover_state(m, q(12, 5), 0, false)), q(36, 25));
  EXPECT_EQ(value_at(m, r, 2, rover_state(m, q(12, 5), 0, true)), 0);
}

TEST(Policy, Examples) {
  Dcmdp m = knapsack();
  SolveResult r = run(m, 2);
  EXPECT_EQ(policy_at(m, r, 2, state(m, {{"k", 0}, {"x1", 60}, {"x2", 70}})), "move_2");
  EXPECT_EQ(policy_at(m, r, 2, state(m, {{"k", 0}, {"x1", 30}, {"x2", 40}})), "move_1");
  EXPECT_THROW(policy_at(m, r, 0, state(m, {{"k", 0}, {"x1", 30}, {"x2", 40}})), Error);

  Dcmdp toy = parse_domain(xsdp::testing::kToyDomain);
  SolveResult rt = run(toy, 1);
  Assignment s;
  s.set(*toy.vars().find("x"), 3);
  s.set_bool(*toy.vars().find("b1"), true);
  s.set_bool(*toy.vars().find("b2"), false);
  EXPECT_EQ(policy_at(toy, rt, 1, s), "act");

  Dcmdp rover = rover1();
  SolveResult rr = run(rover, 2);
  EXPECT_EQ(policy_at(rover, rr, 2, rover_state(rover, q(12, 5), 0, false)), "move");
}

TEST(ValueAt, Errors) {
  Dcmdp m = knapsack();
  SolveResult r = run(m, 1);
  EXPECT_THROW(value_at(m, r, 1, state(m, {{"k", 0}, {"x1", 130}, {"x2", 40}})), Error);
  EXPECT_THROW(value_at(m, r, 1, state(m, {{"k", 0}, {"x1", 30}})), Error);
  EXPECT_THROW(value_at(m, r, 5, state(m, {{"k", 0}, {"x1", 30}, {"x2", 40}})), Error);
}

TEST(SdpProperty, DeterministicDomainsMatchSequenceEnumeration) {
  std::mt19937_64 rng(31);
  for (const char* f : {"knapsack.dcmdp", "rover_linear_k2.dcmdp", "rover_nonlinear_k1.dcmdp"}) {
    Dcmdp m = load_domain(domain_path(f));
    SolveResult r = run(m, 3);
    for (int i = 0; i < 200; ++i) {
      Assignment s = random_state(m, rng);
      for (std::size_t h = 0; h <= 3 && h < r.iterations.size(); ++h)
        ASSERT_EQ(value_at(m, r, h, s), oracle_value(m, s, h)) << f << " h=" << h;
    }
  }
}

TEST(SdpProperty, NoPrimedVariablesSurvive) {
  for (const char* f : {"rover_linear_k2.dcmdp", "rover_nonlinear_k2.dcmdp"}) {
    Dcmdp m = load_domain(domain_path(f));
    SolveResult r = run(m, 3);
    for (const Iteration& it : r.iterations) {
      for (VarId v : m.store->support(it.value)) EXPECT_FALSE(m.vars().is_primed(v));
      for (NodeRef qa : it.q)
        for (VarId v : m.store->support(qa)) EXPECT_FALSE(m.vars().is_primed(v));
    }
  }
}

TEST(SdpProperty, MonotoneForNonnegativeRewards) {
  std::mt19937_64 rng(41);
  for (const char* f : {"knapsack.dcmdp", "rover_linear_k2.dcmdp", "rover_nonlinear_k2.dcmdp"}) {
    Dcmdp m = load_domain(domain_path(f));
    SolveResult r = run(m, 3);
    for (int i = 0; i < 300; ++i) {
      Assignment s = random_state(m, rng);
      for (std::size_t h = 0; h + 1 < r.iterations.size(); ++h)
        ASSERT_GE(value_at(m, r, h + 1, s), value_at(m, r, h, s)) << f;
    }
  }
}

TEST(SdpProperty, PruningDoesNotChangeValues) {
  std::mt19937_64 rng(51);
  for (const char* f : {"knapsack.dcmdp", "rover_linear_k2.dcmdp"}) {
    Dcmdp a = load_domain(domain_path(f));
    Dcmdp b = load_domain(domain_path(f));
    SolveResult ra = run(a, 4), rb = run(b, 4, true);
    ASSERT_EQ(ra.iterations.size(), rb.iterations.size()) << f;
    for (std::size_t h = 0; h < ra.iterations.size(); ++h) {
      EXPECT_LE(rb.at(h).stats.nodes, ra.at(h).stats.nodes) << f;
      for (int i = 0; i < 300; ++i) {
        Assignment s = random_state(a, rng);
        ASSERT_EQ(value_at(a, ra, h, s), value_at(b, rb, h, s)) << f << " h=" << h;
      }
    }
  }
}
