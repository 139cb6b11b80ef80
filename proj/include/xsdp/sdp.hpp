#pragma once

// Symbolic value iteration over XADDs.

#include "xsdp/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xsdp {

struct SolveOptions {
  std::size_t horizon = 0;
  bool prune = false;
  /// V0 = max_a R_a instead of 0.
  bool reward_init = false;
  std::optional<Rational> discount;  // overrides the model's
  /// Drop the store's operation caches after every iteration.
  bool clear_caches = false;
};

struct Iteration {
  std::size_t horizon = 0;
  NodeRef value;
  std::vector<NodeRef> q;  // per action, declaration order; empty for V0
  DiagramStats stats;
  double time_ms = 0;
};

struct SolveResult {
  std::vector<Iteration> iterations;  // iterations[h] holds V^h
  std::size_t final_horizon = 0;
  bool converged = false;

  const Iteration& at(std::size_t h) const;
};

struct Backup {
  NodeRef value;
  std::vector<NodeRef> q;
};

/// Q_a = R_a + gamma * sum_b' integral_x' P(b', x' | b, x, a) V(b', x').
/// Continuous variables are eliminated first (CSE conditions may test
/// next-state booleans), then booleans, both in declaration order.
NodeRef regress(const Dcmdp& m, const Action& a, NodeRef value, const Rational& discount);
NodeRef regress(const Dcmdp& m, const Action& a, NodeRef value);

/// V' = max(Q_a1, max(..., max(Q_a{p-1}, Q_ap))).
Backup backup(const Dcmdp& m, NodeRef value, bool prune);
Backup backup(const Dcmdp& m, NodeRef value, bool prune, const Rational& discount);

/// Iterates backups from V0 until `options.horizon` or until V^{h+1} is the
/// same node as V^h. The fixpoint test is structural: sufficient, not
/// necessary, for semantic convergence.
SolveResult solve(const Dcmdp& m, const SolveOptions& options);

/// V^h(s). Throws Error on an out-of-bounds or incomplete state, or a
/// horizon that was not computed.
Rational value_at(const Dcmdp& m, const SolveResult& r, std::size_t h, const Assignment& s);

/// argmax_a Q_a^h(s); ties go to the earliest declared action.
std::string policy_at(const Dcmdp& m, const SolveResult& r, std::size_t h, const Assignment& s);

/// Throws Error unless every state variable is assigned and in bounds.
void check_state(const Dcmdp& m, const Assignment& s);

}  // namespace xsdp
