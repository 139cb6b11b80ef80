#pragma once

#include "xsdp/xadd.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace xsdp {

/// One action of a factored hybrid MDP. Diagrams live in the owning model's
/// store. Variables missing from `cpts` / `cses` keep their value.
struct Action {
  std::string name;
  std::map<VarId, NodeRef> cpts;  // unprimed bvar -> P(b' = true | b, x)
  std::map<VarId, NodeRef> cses;  // unprimed cvar -> tree whose leaves give x'
  NodeRef reward;                 // over current-state variables only
};

struct Dcmdp {
  std::string name;
  std::shared_ptr<Store> store;
  std::vector<VarId> bvars;  // unprimed, declaration order
  std::vector<VarId> cvars;
  std::vector<Action> actions;
  Rational discount = 1;
  std::optional<std::size_t> horizon;  // nullopt = unbounded

  const VarRegistry& vars() const { return store->vars(); }
  const Action* find_action(const std::string& action_name) const;
  /// CPT for `b` under `a`, defaulting to a copy of the current value.
  NodeRef cpt(const Action& a, VarId b) const;
  /// CSE for `x` under `a`, defaulting to the identity x' = x.
  NodeRef cse(const Action& a, VarId x) const;
};

struct Violation {
  std::string where;  // "action move_1, cpt b1'" etc.
  std::string rule;

  std::string to_string() const { return where + ": " + rule; }
};

/// Empty iff the model is well formed.
std::vector<Violation> validate(const Dcmdp& m);

/// Uniform random in-bounds state over every state variable of `m`
/// (rationals with denominator `denominator`).
template <class Rng>
Assignment random_state(const Dcmdp& m, Rng& rng, long denominator = 1000);

// ------------------------------------------------------------------------

template <class Rng>
Assignment random_state(const Dcmdp& m, Rng& rng, long denominator) {
  Assignment s;
  for (VarId b : m.bvars) s.set_bool(b, (rng() & 1U) != 0);
  for (VarId x : m.cvars) {
    const VarInfo& info = m.vars().info(x);
    const Rational width = info.upper - info.lower;
    const auto k = static_cast<long>(rng() % static_cast<unsigned long>(denominator + 1));
    Rational v = info.lower + width * Rational(mpz_class(k), mpz_class(denominator));
    v.canonicalize();
    s.set(x, v);
  }
  return s;
}

}  // namespace xsdp
