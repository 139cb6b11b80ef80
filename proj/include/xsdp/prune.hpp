#pragma once

// Linear feasibility over path constraints (exact phase-one simplex) and
// infeasible-path pruning of diagrams.

#include "xsdp/xadd.hpp"

#include <map>
#include <utility>
#include <vector>

namespace xsdp {

/// `poly > 0` / `poly >= 0` asserted true or false. Strictness is dropped
/// when checking: the relaxed system is what gets tested.
struct LinearConstraint {
  Polynomial poly;
  bool strict = false;
  bool truth = true;
};

struct ConstraintSet {
  std::vector<LinearConstraint> constraints;
  std::map<VarId, std::pair<Rational, Rational>> bounds;

  /// Box bounds of every continuous variable in `vars`.
  static ConstraintSet with_bounds(const VarRegistry& vars);
  void add(const Polynomial& poly, bool strict, bool truth) { constraints.push_back({poly, strict, truth}); }
};

/// False only if the relaxed system has no solution inside the bounds.
/// Throws Error on a nonlinear constraint or a variable without bounds.
bool feasible(const ConstraintSet& cs);

/// Removes branches made infeasible by the linear decisions above them.
/// Boolean and nonlinear decisions contribute no constraints.
class Pruner {
 public:
  explicit Pruner(Store& store);

  NodeRef prune(NodeRef f);

  std::size_t lp_calls() const { return lp_calls_; }

 private:
  using Path = std::vector<std::pair<std::uint32_t, bool>>;  // sorted (decision, truth)

  NodeRef prune_pass(NodeRef f);
  NodeRef visit(NodeRef n, Path& path);
  bool path_feasible(const Path& path);

  Store& store_;
  ConstraintSet base_;
  std::map<Path, bool> lp_cache_;
  std::map<std::pair<std::uint32_t, Path>, NodeRef> memo_;
  std::size_t lp_calls_ = 0;
};

/// One-shot convenience over Pruner.
NodeRef prune(Store& store, NodeRef f);

}  // namespace xsdp
