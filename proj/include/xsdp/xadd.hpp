#pragma once

// XADD store: hash-consed decision diagrams whose internal nodes test
// decisions (boolean variables or polynomial inequalities) and whose
// terminals hold polynomials.

#include "xsdp/poly.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace xsdp {

struct NodeRef {
  std::uint32_t id = 0;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

enum class Op { add, sub, mul, max, min };

/// Simultaneous substitution for diagrams. Continuous keys map to
/// polynomials, boolean keys may only be renamed to other booleans.
struct Substitution {
  std::map<VarId, Polynomial> continuous;
  std::map<VarId, VarId> boolean;
  bool empty() const { return continuous.empty() && boolean.empty(); }
};

struct DiagramStats {
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t decisions = 0;  // distinct decisions tested
};

class Store {
 public:
  static constexpr std::uint32_t kNoDecision = 0xffffffffU;

  Store() = default;
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  VarRegistry& vars() { return vars_; }
  const VarRegistry& vars() const { return vars_; }

  // ---- decisions
  std::uint32_t register_decision(const Decision& d);
  std::uint32_t bool_decision(VarId v) { return register_decision(Decision::boolean(v)); }
  const Decision& decision(std::uint32_t id) const { return decisions_.at(id); }
  std::size_t decision_count() const { return decisions_.size(); }
  /// Position in the global test order. Boolean decisions precede every
  /// inequality; within a kind, registration order.
  std::uint64_t order_of(std::uint32_t decision_id) const { return order_.at(decision_id); }

  // ---- construction
  NodeRef terminal(const Polynomial& p);
  NodeRef constant(const Rational& c) { return terminal(Polynomial::constant(c)); }
  NodeRef zero() { return constant(0); }
  NodeRef one() { return constant(1); }
  /// Reduced, shared internal node. If `flipped`, the children are swapped
  /// first. Throws Error when a child tests a decision ordered at or before
  /// `decision_id`.
  NodeRef internal(std::uint32_t decision_id, bool flipped, NodeRef high, NodeRef low);
  NodeRef internal(const OrientedDecision& d, NodeRef high, NodeRef low);
  /// Same as internal() but without the order check; the result may be an
  /// unordered fragment that must go through reorder() before use.
  NodeRef fragment(std::uint32_t decision_id, NodeRef high, NodeRef low);
  /// 1 where the decision holds (or fails, when `positive` is false), else 0.
  NodeRef indicator(std::uint32_t decision_id, bool positive = true);
  /// Ordered if-then-else built from indicators.
  NodeRef ite(std::uint32_t decision_id, NodeRef high, NodeRef low);

  // ---- inspection
  bool is_terminal(NodeRef f) const { return nodes_.at(f.id).decision == kNoDecision; }
  const Polynomial& terminal_poly(NodeRef f) const { return polys_.at(nodes_.at(f.id).poly); }
  std::uint32_t decision_of(NodeRef f) const { return nodes_.at(f.id).decision; }
  NodeRef high(NodeRef f) const { return nodes_.at(f.id).high; }
  NodeRef low(NodeRef f) const { return nodes_.at(f.id).low; }
  bool is_ordered(NodeRef f) const { return nodes_.at(f.id).ordered; }
  std::size_t size() const { return nodes_.size(); }

  DiagramStats stats(NodeRef f) const;
  std::size_t node_count(NodeRef f) const { return stats(f).nodes; }
  /// Every variable mentioned by a reachable decision or terminal.
  std::set<VarId> support(NodeRef f) const;
  std::set<std::uint32_t> decisions_in(NodeRef f) const;
  /// Walks the diagram checking the order and reduce invariants.
  bool is_canonical(NodeRef f) const;

  // ---- operations
  NodeRef apply(NodeRef f, NodeRef g, Op op);
  NodeRef scale(NodeRef f, const Rational& c) { return apply(f, constant(c), Op::mul); }
  NodeRef negate(NodeRef f) { return scale(f, -1); }
  NodeRef restrict(NodeRef f, VarId v, bool value);
  NodeRef substitute(NodeRef f, const Substitution& sigma);
  /// Integrates f against delta[v - cse]: at every leaf g of `cse`, f with
  /// v replaced by g, guarded by the cse's conditions.
  NodeRef substitute_conditional(NodeRef f, VarId v, NodeRef cse);
  /// Algorithm-1 reordering: reorder(hi) * I[d] + reorder(lo) * I[!d].
  NodeRef reorder(NodeRef f);

  Rational evaluate(NodeRef f, const Assignment& s) const;
  /// Terminal reached by `s`.
  NodeRef leaf_for(NodeRef f, const Assignment& s) const;

  std::string export_dot(NodeRef f) const;

  void clear_caches();

 private:
  struct Node {
    std::uint32_t decision = kNoDecision;
    NodeRef high, low;
    std::uint32_t poly = 0;
    bool ordered = true;
  };
  struct TripleHash {
    std::size_t operator()(const std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>& k) const;
  };

  std::uint64_t top_order(NodeRef f) const;
  NodeRef make_node(std::uint32_t decision_id, NodeRef high, NodeRef low);
  NodeRef apply_rec(NodeRef f, NodeRef g, Op op);
  NodeRef apply_terminals(NodeRef f, NodeRef g, Op op);
  NodeRef reorder_rec(NodeRef f);

  VarRegistry vars_;

  std::vector<Decision> decisions_;
  std::vector<std::uint64_t> order_;
  std::vector<std::int8_t> box_truth_;  // -1 unknown, else the decision's value on every in-bounds state
  std::unordered_map<Decision, std::uint32_t, DecisionHash> decision_ids_;
  std::uint32_t bool_count_ = 0;
  std::uint32_t ineq_count_ = 0;

  std::vector<Node> nodes_;
  std::vector<Polynomial> polys_;
  std::unordered_map<Polynomial, NodeRef, PolynomialHash> terminal_ids_;
  std::unordered_map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, NodeRef, TripleHash> internal_ids_;

  std::unordered_map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, NodeRef, TripleHash> apply_cache_;
  std::unordered_map<std::uint32_t, NodeRef> reorder_cache_;
};

std::string to_string(Op op);

}  // namespace xsdp
