#include "xsdp/model.hpp"

#include <random>

namespace xsdp {

const Action* Dcmdp::find_action(const std::string& action_name) const {
  for (const auto& a : actions)
    if (a.name == action_name) return &a;
  return nullptr;
}

NodeRef Dcmdp::cpt(const Action& a, VarId b) const {
  if (auto it = a.cpts.find(b); it != a.cpts.end()) return it->second;
  return store->indicator(store->bool_decision(b), true);
}

NodeRef Dcmdp::cse(const Action& a, VarId x) const {
  if (auto it = a.cses.find(x); it != a.cses.end()) return it->second;
  return store->terminal(Polynomial::variable(x));
}

namespace {

constexpr int kProbabilitySamples = 1000;

void check_probabilities(const Dcmdp& m, const std::string& where, NodeRef cpt,
                         std::vector<Violation>& out) {
  const Store& s = *m.store;
  bool polynomial_leaf = false;
  std::vector<NodeRef> stack{cpt};
  std::set<std::uint32_t> seen;
  while (!stack.empty()) {
    NodeRef n = stack.back();
    stack.pop_back();
    if (!seen.insert(n.id).second) continue;
    if (!s.is_terminal(n)) {
      stack.push_back(s.high(n));
      stack.push_back(s.low(n));
      continue;
    }
    const Polynomial& p = s.terminal_poly(n);
    if (!p.is_constant()) {
      polynomial_leaf = true;
      continue;
    }
    const Rational c = p.constant_term();
    if (c < 0 || c > 1) {
      out.push_back({where, "probability out of [0,1] (" + to_string(c) + ")"});
      return;
    }
  }
  if (!polynomial_leaf) return;
  std::mt19937_64 rng(0x5eed);
  for (int i = 0; i < kProbabilitySamples; ++i) {
    Assignment st = random_state(m, rng);
    const Rational v = s.evaluate(cpt, st);
    if (v < 0 || v > 1) {
      out.push_back({where, "probability out of [0,1] (" + to_string(v) + " at a sampled state)"});
      return;
    }
  }
}

}  // namespace

std::vector<Violation> validate(const Dcmdp& m) {
  std::vector<Violation> out;
  const VarRegistry& vars = m.vars();
  if (m.discount < 0 || m.discount > 1) out.push_back({"domain", "discount outside [0,1]"});
  if (m.actions.empty()) out.push_back({"domain", "no actions"});
  for (VarId x : m.cvars) {
    const VarInfo& i = vars.info(x);
    if (i.lower > i.upper) out.push_back({"cvar " + i.name, "inverted bounds"});
  }

  for (const Action& a : m.actions) {
    const std::string prefix = "action " + a.name;
    for (const auto& [b, cpt] : a.cpts) {
      const std::string where = prefix + ", cpt " + vars.display_name(b) + "'";
      if (!vars.is_boolean(b) || vars.is_primed(b)) {
        out.push_back({where, "cpt keyed by a non-boolean or primed variable"});
        continue;
      }
      for (VarId v : m.store->support(cpt)) {
        if (!vars.is_primed(v)) continue;
        out.push_back({where, vars.is_boolean(v) ? "synchronic arc within boolean variables"
                                                 : "cpt conditions on a next-state continuous variable"});
        break;
      }
      check_probabilities(m, where, cpt, out);
    }
    for (const auto& [x, cse] : a.cses) {
      const std::string where = prefix + ", cse " + vars.display_name(x) + "'";
      if (vars.is_boolean(x) || vars.is_primed(x)) {
        out.push_back({where, "cse keyed by a boolean or primed variable"});
        continue;
      }
      for (VarId v : m.store->support(cse)) {
        if (vars.is_primed(v) && !vars.is_boolean(v)) {
          out.push_back({where, "synchronic arc within continuous variables"});
          break;
        }
      }
    }
    for (VarId v : m.store->support(a.reward)) {
      if (vars.is_primed(v)) {
        out.push_back({prefix + ", reward", "reward depends on a next-state variable"});
        break;
      }
    }
  }
  return out;
}

}  // namespace xsdp
