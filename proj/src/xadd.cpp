#include "xsdp/xadd.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace xsdp {

namespace {

constexpr std::uint64_t kTerminalOrder = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kIneqBase = 1ULL << 32U;

bool commutative(Op op) { return op == Op::add || op == Op::mul || op == Op::max || op == Op::min; }

}  // namespace

std::string to_string(Op op) {
  switch (op) {
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::max: return "max";
    case Op::min: return "min";
  }
  return "?";
}

std::size_t Store::TripleHash::operator()(
    const std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>& k) const {
  std::size_t seed = std::get<0>(k);
  hash_combine(seed, std::get<1>(k));
  hash_combine(seed, std::get<2>(k));
  return seed;
}

// --------------------------------------------------------------- decisions

namespace {

struct Interval {
  Rational lo, hi;
};

Interval times(const Interval& a, const Interval& b) {
  Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

Interval power(const Interval& x, std::uint32_t e) {
  Interval r{1, 1};
  for (std::uint32_t i = 0; i < e; ++i) r = times(r, x);
  if (e % 2 == 0 && x.lo < 0 && x.hi > 0) r.lo = 0;
  return r;
}

// Truth of `d` when it is the same on the whole bounds box, else -1.
std::int8_t box_truth(const VarRegistry& vars, const Decision& d) {
  if (d.is_boolean()) return -1;
  Interval sum{0, 0};
  for (const auto& term : d.poly.terms()) {
    Interval m{1, 1};
    for (const auto& [v, e] : term.monomial.factors) {
      const VarInfo& info = vars.info(v);
      m = times(m, power({info.lower, info.upper}, e));
    }
    m = times(m, {term.coeff, term.coeff});
    sum.lo += m.lo;
    sum.hi += m.hi;
  }
  if (d.strict ? sum.lo > 0 : sum.lo >= 0) return 1;
  if (d.strict ? sum.hi <= 0 : sum.hi < 0) return 0;
  return -1;
}

}  // namespace

std::uint32_t Store::register_decision(const Decision& d) {
  if (auto it = decision_ids_.find(d); it != decision_ids_.end()) return it->second;
  if (d.is_boolean()) {
    if (d.var.index >= vars_.size() || !vars_.is_boolean(d.var))
      throw Error("boolean decision on a non-boolean variable");
  } else {
    if (d.poly.is_constant()) throw Error("constant inequality cannot be a decision");
    for (VarId v : d.poly.variables())
      if (v.index >= vars_.size() || vars_.is_boolean(v))
        throw Error("boolean variable inside a polynomial");
  }
  auto id = static_cast<std::uint32_t>(decisions_.size());
  decisions_.push_back(d);
  order_.push_back(d.is_boolean() ? bool_count_++ : kIneqBase + ineq_count_++);
  box_truth_.push_back(box_truth(vars_, d));
  decision_ids_.emplace(d, id);
  return id;
}

// ------------------------------------------------------------ construction

NodeRef Store::terminal(const Polynomial& p) {
  if (auto it = terminal_ids_.find(p); it != terminal_ids_.end()) return it->second;
  NodeRef r{static_cast<std::uint32_t>(nodes_.size())};
  Node n;
  n.poly = static_cast<std::uint32_t>(polys_.size());
  polys_.push_back(p);
  nodes_.push_back(n);
  terminal_ids_.emplace(p, r);
  return r;
}

std::uint64_t Store::top_order(NodeRef f) const {
  const Node& n = nodes_.at(f.id);
  return n.decision == kNoDecision ? kTerminalOrder : order_[n.decision];
}

NodeRef Store::make_node(std::uint32_t decision_id, NodeRef high, NodeRef low) {
  if (high == low) return high;
  if (const std::int8_t t = box_truth_.at(decision_id); t >= 0) return t ? high : low;
  auto key = std::make_tuple(decision_id, high.id, low.id);
  if (auto it = internal_ids_.find(key); it != internal_ids_.end()) return it->second;
  Node n;
  n.decision = decision_id;
  n.high = high;
  n.low = low;
  const std::uint64_t mine = order_.at(decision_id);
  n.ordered = nodes_[high.id].ordered && nodes_[low.id].ordered && mine < top_order(high) &&
              mine < top_order(low);
  NodeRef r{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(n);
  internal_ids_.emplace(key, r);
  return r;
}

NodeRef Store::internal(std::uint32_t decision_id, bool flipped, NodeRef high, NodeRef low) {
  if (decision_id >= decisions_.size()) throw Error("unknown decision id");
  if (flipped) std::swap(high, low);
  if (high == low) return high;
  const std::uint64_t mine = order_[decision_id];
  if (mine >= top_order(high) || mine >= top_order(low) || !is_ordered(high) || !is_ordered(low))
    throw Error("internal node violates the decision order; build a fragment and reorder it");
  return make_node(decision_id, high, low);
}

NodeRef Store::internal(const OrientedDecision& d, NodeRef high, NodeRef low) {
  return internal(register_decision(d.decision), d.flipped, high, low);
}

NodeRef Store::fragment(std::uint32_t decision_id, NodeRef high, NodeRef low) {
  if (decision_id >= decisions_.size()) throw Error("unknown decision id");
  return make_node(decision_id, high, low);
}

NodeRef Store::indicator(std::uint32_t decision_id, bool positive) {
  NodeRef a = one();
  NodeRef b = zero();
  return positive ? make_node(decision_id, a, b) : make_node(decision_id, b, a);
}

NodeRef Store::ite(std::uint32_t decision_id, NodeRef high, NodeRef low) {
  NodeRef hi = apply(indicator(decision_id, true), high, Op::mul);
  NodeRef lo = apply(indicator(decision_id, false), low, Op::mul);
  return apply(hi, lo, Op::add);
}

// ------------------------------------------------------------- inspection

DiagramStats Store::stats(NodeRef f) const {
  DiagramStats s;
  std::unordered_set<std::uint32_t> seen;
  std::unordered_set<std::uint32_t> decisions;
  std::vector<NodeRef> stack{f};
  while (!stack.empty()) {
    NodeRef n = stack.back();
    stack.pop_back();
    if (!seen.insert(n.id).second) continue;
    ++s.nodes;
    if (is_terminal(n)) {
      ++s.leaves;
    } else {
      decisions.insert(decision_of(n));
      stack.push_back(high(n));
      stack.push_back(low(n));
    }
  }
  s.decisions = decisions.size();
  return s;
}

std::set<std::uint32_t> Store::decisions_in(NodeRef f) const {
  std::set<std::uint32_t> out;
  std::unordered_set<std::uint32_t> seen;
  std::vector<NodeRef> stack{f};
  while (!stack.empty()) {
    NodeRef n = stack.back();
    stack.pop_back();
    if (!seen.insert(n.id).second || is_terminal(n)) continue;
    out.insert(decision_of(n));
    stack.push_back(high(n));
    stack.push_back(low(n));
  }
  return out;
}

std::set<VarId> Store::support(NodeRef f) const {
  std::set<VarId> out;
  std::unordered_set<std::uint32_t> seen;
  std::vector<NodeRef> stack{f};
  while (!stack.empty()) {
    NodeRef n = stack.back();
    stack.pop_back();
    if (!seen.insert(n.id).second) continue;
    if (is_terminal(n)) {
      auto vs = terminal_poly(n).variables();
      out.insert(vs.begin(), vs.end());
    } else {
      auto vs = decision(decision_of(n)).variables();
      out.insert(vs.begin(), vs.end());
      stack.push_back(high(n));
      stack.push_back(low(n));
    }
  }
  return out;
}

bool Store::is_canonical(NodeRef f) const {
  std::unordered_set<std::uint32_t> seen;
  std::vector<NodeRef> stack{f};
  while (!stack.empty()) {
    NodeRef n = stack.back();
    stack.pop_back();
    if (!seen.insert(n.id).second || is_terminal(n)) continue;
    NodeRef h = high(n);
    NodeRef l = low(n);
    if (h == l) return false;
    const std::uint64_t mine = order_[decision_of(n)];
    if (mine >= top_order(h) || mine >= top_order(l)) return false;
    stack.push_back(h);
    stack.push_back(l);
  }
  return true;
}

// --------------------------------------------------------------- apply

NodeRef Store::apply_terminals(NodeRef f, NodeRef g, Op op) {
  const Polynomial& p = terminal_poly(f);
  const Polynomial& q = terminal_poly(g);
  switch (op) {
    case Op::add: return terminal(p + q);
    case Op::sub: return terminal(p - q);
    case Op::mul: return terminal(p * q);
    case Op::max:
    case Op::min: {
      Polynomial diff = p - q;
      if (diff.is_constant()) {
        const Rational c = diff.constant_term();
        if (op == Op::max) return c > 0 ? f : g;
        return c < 0 ? f : g;
      }
      // The new decision always reads "d > 0" with a positive leading
      // coefficient, so max(f, g) and max(g, f) build the same node.
      const bool f_minus_g = sgn(diff.leading_coeff()) > 0;
      auto norm = normalize_inequality(f_minus_g ? diff : -diff, true);
      const auto& od = std::get<OrientedDecision>(norm);
      const std::uint32_t d = register_decision(od.decision);
      NodeRef bigger_if_true = f_minus_g ? f : g;
      NodeRef other = f_minus_g ? g : f;
      return op == Op::max ? make_node(d, bigger_if_true, other) : make_node(d, other, bigger_if_true);
    }
  }
  return f;
}

NodeRef Store::apply_rec(NodeRef f, NodeRef g, Op op) {
  const bool ft = is_terminal(f);
  const bool gt = is_terminal(g);
  auto is_const = [&](NodeRef n, int c) {
    if (!is_terminal(n)) return false;
    const Polynomial& p = terminal_poly(n);
    return p.is_constant() && p.constant_term() == c;
  };
  switch (op) {
    case Op::add:
      if (is_const(f, 0)) return g;
      if (is_const(g, 0)) return f;
      break;
    case Op::sub:
      if (is_const(g, 0)) return f;
      if (f == g) return zero();
      break;
    case Op::mul:
      if (is_const(f, 0) || is_const(g, 1)) return f;
      if (is_const(g, 0) || is_const(f, 1)) return g;
      break;
    case Op::max:
    case Op::min:
      if (f == g) return f;
      break;
  }
  if (ft && gt) return apply_terminals(f, g, op);

  if (commutative(op) && g < f) std::swap(f, g);
  const auto key = std::make_tuple(f.id, g.id, static_cast<std::uint32_t>(op));
  if (auto it = apply_cache_.find(key); it != apply_cache_.end()) return it->second;

  const std::uint64_t of = top_order(f);
  const std::uint64_t og = top_order(g);
  const std::uint32_t top = of <= og ? decision_of(f) : decision_of(g);
  NodeRef fh = f, fl = f, gh = g, gl = g;
  if (!ft && decision_of(f) == top) {
    fh = high(f);
    fl = low(f);
  }
  if (!gt && decision_of(g) == top) {
    gh = high(g);
    gl = low(g);
  }
  NodeRef hi = apply_rec(fh, gh, op);
  NodeRef lo = apply_rec(fl, gl, op);
  NodeRef r = make_node(top, hi, lo);
  apply_cache_.emplace(key, r);
  return r;
}

NodeRef Store::apply(NodeRef f, NodeRef g, Op op) {
  if (!is_ordered(f)) f = reorder(f);
  if (!is_ordered(g)) g = reorder(g);
  NodeRef r = apply_rec(f, g, op);
  // max/min may introduce decisions at the leaves that sit above their
  // ancestors in the global order
  if (op == Op::max || op == Op::min) r = reorder(r);
  return r;
}

// -------------------------------------------------------------- reorder

NodeRef Store::reorder_rec(NodeRef f) {
  if (is_ordered(f)) return f;
  if (auto it = reorder_cache_.find(f.id); it != reorder_cache_.end()) return it->second;
  const std::uint32_t d = decision_of(f);
  NodeRef hi = reorder_rec(high(f));
  NodeRef lo = reorder_rec(low(f));
  NodeRef t = apply_rec(hi, indicator(d, true), Op::mul);
  NodeRef e = apply_rec(lo, indicator(d, false), Op::mul);
  NodeRef r = apply_rec(t, e, Op::add);
  reorder_cache_.emplace(f.id, r);
  return r;
}

NodeRef Store::reorder(NodeRef f) { return reorder_rec(f); }

// ------------------------------------------------------------- restrict

NodeRef Store::restrict(NodeRef f, VarId v, bool value) {
  if (v.index >= vars_.size() || !vars_.is_boolean(v)) throw Error("restrict needs a boolean variable");
  auto it = decision_ids_.find(Decision::boolean(v));
  if (it == decision_ids_.end()) return f;
  const std::uint32_t target = it->second;
  const std::uint64_t target_order = order_[target];
  std::unordered_map<std::uint32_t, NodeRef> memo;
  auto rec = [&](auto&& self, NodeRef n) -> NodeRef {
    if (is_terminal(n)) return n;
    if (is_ordered(n) && top_order(n) > target_order) return n;
    if (auto m = memo.find(n.id); m != memo.end()) return m->second;
    NodeRef r;
    if (decision_of(n) == target) {
      r = self(self, value ? high(n) : low(n));
    } else {
      r = make_node(decision_of(n), self(self, high(n)), self(self, low(n)));
    }
    memo.emplace(n.id, r);
    return r;
  };
  return rec(rec, f);
}

// ----------------------------------------------------------- substitute

NodeRef Store::substitute(NodeRef f, const Substitution& sigma) {
  if (sigma.empty()) return f;
  for (const auto& [key, repl] : sigma.continuous) {
    if (vars_.is_boolean(key)) throw Error("substitution maps a boolean variable to a polynomial");
    for (VarId rv : repl.variables()) {
      if (vars_.is_boolean(rv)) throw Error("boolean variable inside a polynomial");
      if (sigma.continuous.count(rv) != 0)
        throw Error("substitution is not disjoint: '" + vars_.display_name(rv) +
                    "' is both replaced and used in a replacement");
    }
  }
  for (const auto& [key, target] : sigma.boolean)
    if (!vars_.is_boolean(key) || !vars_.is_boolean(target))
      throw Error("boolean substitution must rename a boolean to a boolean");

  // image of each decision: a (possibly flipped) decision id, or a constant
  struct Image {
    std::int8_t constant = -1;
    std::uint32_t id = 0;
    bool flipped = false;
  };
  std::unordered_map<std::uint32_t, Image> images;
  auto image = [&](std::uint32_t id) -> Image {
    if (auto it = images.find(id); it != images.end()) return it->second;
    const Decision& d = decisions_[id];
    Image img{-1, id, false};
    if (d.is_boolean()) {
      if (auto b = sigma.boolean.find(d.var); b != sigma.boolean.end()) img.id = bool_decision(b->second);
    } else {
      Polynomial p = d.poly.substitute(sigma.continuous);
      if (p != d.poly) {
        auto norm = normalize_inequality(p, d.strict);
        if (std::holds_alternative<bool>(norm)) {
          img.constant = std::get<bool>(norm) ? 1 : 0;
        } else {
          const auto& od = std::get<OrientedDecision>(norm);
          img.id = register_decision(od.decision);
          img.flipped = od.flipped;
        }
      }
    }
    images.emplace(id, img);
    return img;
  };

  std::unordered_map<std::uint32_t, NodeRef> memo;
  auto rec = [&](auto&& self, NodeRef n) -> NodeRef {
    if (auto m = memo.find(n.id); m != memo.end()) return m->second;
    NodeRef r;
    if (is_terminal(n)) {
      r = terminal(terminal_poly(n).substitute(sigma.continuous));
    } else {
      const Image img = image(decision_of(n));
      if (img.constant >= 0) {
        r = self(self, img.constant ? high(n) : low(n));
      } else {
        NodeRef hi = self(self, high(n));
        NodeRef lo = self(self, low(n));
        r = img.flipped ? make_node(img.id, lo, hi) : make_node(img.id, hi, lo);
      }
    }
    memo.emplace(n.id, r);
    return r;
  };
  return reorder(rec(rec, f));
}

NodeRef Store::substitute_conditional(NodeRef f, VarId v, NodeRef cse) {
  if (vars_.is_boolean(v)) throw Error("conditional substitution target must be continuous");
  for (std::uint32_t d : decisions_in(cse))
    if (decision(d).variables().count(v) != 0)
      throw Error("conditional equation for '" + vars_.display_name(v) + "' tests its own target");
  std::unordered_map<std::uint32_t, NodeRef> memo;
  auto rec = [&](auto&& self, NodeRef c) -> NodeRef {
    if (auto m = memo.find(c.id); m != memo.end()) return m->second;
    NodeRef r;
    if (is_terminal(c)) {
      Substitution s;
      s.continuous.emplace(v, terminal_poly(c));
      r = substitute(f, s);
    } else {
      r = make_node(decision_of(c), self(self, high(c)), self(self, low(c)));
    }
    memo.emplace(c.id, r);
    return r;
  };
  return reorder(rec(rec, cse));
}

// ------------------------------------------------------------ evaluation

NodeRef Store::leaf_for(NodeRef f, const Assignment& s) const {
  NodeRef n = f;
  while (!is_terminal(n)) n = decision(decision_of(n)).holds(s, &vars_) ? high(n) : low(n);
  return n;
}

Rational Store::evaluate(NodeRef f, const Assignment& s) const {
  return terminal_poly(leaf_for(f, s)).evaluate(s, &vars_);
}

// ---------------------------------------------------------------- export

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string Store::export_dot(NodeRef f) const {
  std::unordered_map<std::uint32_t, std::size_t> label;
  std::vector<NodeRef> order;
  auto visit = [&](auto&& self, NodeRef n) -> void {
    if (label.count(n.id) != 0) return;
    label.emplace(n.id, order.size());
    order.push_back(n);
    if (!is_terminal(n)) {
      self(self, high(n));
      self(self, low(n));
    }
  };
  visit(visit, f);

  std::ostringstream out;
  out << "digraph xadd {\n";
  for (NodeRef n : order) {
    const std::size_t i = label[n.id];
    if (is_terminal(n)) {
      out << "  n" << i << " [shape=box, label=\"" << dot_escape(terminal_poly(n).to_string(vars_))
          << "\"];\n";
    } else {
      out << "  n" << i << " [shape=ellipse, label=\""
          << dot_escape(decision(decision_of(n)).to_string(vars_)) << "\"];\n";
    }
  }
  for (NodeRef n : order) {
    if (is_terminal(n)) continue;
    const std::size_t i = label[n.id];
    out << "  n" << i << " -> n" << label[high(n).id] << " [style=solid];\n";
    out << "  n" << i << " -> n" << label[low(n).id] << " [style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

void Store::clear_caches() {
  apply_cache_.clear();
  reorder_cache_.clear();
}

}  // namespace xsdp
