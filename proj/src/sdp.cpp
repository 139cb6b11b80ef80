#include "xsdp/sdp.hpp"

#include "xsdp/prune.hpp"

#include <chrono>

namespace xsdp {

const Iteration& SolveResult::at(std::size_t h) const {
  if (h >= iterations.size())
    throw Error("horizon " + std::to_string(h) + " was not computed (have 0.." +
                std::to_string(iterations.size() - 1) + ")");
  return iterations[h];
}

NodeRef regress(const Dcmdp& m, const Action& a, NodeRef value, const Rational& discount) {
  Store& s = *m.store;
  const VarRegistry& vars = s.vars();
  for (VarId v : s.support(value))
    if (vars.is_primed(v)) throw Error("value function mentions next-state variable '" + vars.display_name(v) + "'");

  // prime
  Substitution prime;
  for (VarId b : m.bvars) prime.boolean.emplace(b, vars.primed(b));
  for (VarId x : m.cvars) prime.continuous.emplace(x, Polynomial::variable(vars.primed(x)));
  NodeRef q = s.substitute(value, prime);

  // continuous integration: each delta triggers a (conditional) substitution
  for (VarId x : m.cvars) {
    const VarId xp = vars.primed(x);
    if (s.support(q).count(xp) == 0) continue;
    q = s.substitute_conditional(q, xp, m.cse(a, x));
  }

  // discrete marginalization
  for (VarId b : m.bvars) {
    const VarId bp = vars.primed(b);
    if (s.support(q).count(bp) == 0) continue;  // sums to q * (p + 1 - p)
    const NodeRef p_true = m.cpt(a, b);
    const std::uint32_t d = s.bool_decision(bp);
    const NodeRef p = s.ite(d, p_true, s.apply(s.one(), p_true, Op::sub));
    const NodeRef joint = s.apply(q, p, Op::mul);
    q = s.apply(s.restrict(joint, bp, true), s.restrict(joint, bp, false), Op::add);
  }

  return s.apply(a.reward, s.scale(q, discount), Op::add);
}

NodeRef regress(const Dcmdp& m, const Action& a, NodeRef value) {
  return regress(m, a, value, m.discount);
}

Backup backup(const Dcmdp& m, NodeRef value, bool prune, const Rational& discount) {
  Store& s = *m.store;
  Backup out;
  for (const Action& a : m.actions) {
    NodeRef q = regress(m, a, value, discount);
    if (prune) q = xsdp::prune(s, q);
    out.q.push_back(q);
  }
  // right fold: max(Q1, max(Q2, ... max(Q{p-1}, Qp)))
  NodeRef v = out.q.back();
  for (std::size_t i = out.q.size() - 1; i-- > 0;) v = s.apply(out.q[i], v, Op::max);
  if (prune) v = xsdp::prune(s, v);
  out.value = v;
  return out;
}

Backup backup(const Dcmdp& m, NodeRef value, bool prune) { return backup(m, value, prune, m.discount); }

SolveResult solve(const Dcmdp& m, const SolveOptions& options) {
  using Clock = std::chrono::steady_clock;
  Store& s = *m.store;
  const Rational discount = options.discount.value_or(m.discount);
  SolveResult result;

  auto t0 = Clock::now();
  NodeRef v0 = s.zero();
  if (options.reward_init) {
    v0 = m.actions.front().reward;
    for (std::size_t i = 1; i < m.actions.size(); ++i) v0 = s.apply(v0, m.actions[i].reward, Op::max);
    if (options.prune) v0 = prune(s, v0);
  }
  Iteration first;
  first.value = v0;
  first.stats = s.stats(v0);
  first.time_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  result.iterations.push_back(std::move(first));

  for (std::size_t h = 1; h <= options.horizon; ++h) {
    auto start = Clock::now();
    Backup b = backup(m, result.iterations.back().value, options.prune, discount);
    Iteration it;
    it.horizon = h;
    it.value = b.value;
    it.q = std::move(b.q);
    it.stats = s.stats(b.value);
    it.time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    const bool same = it.value == result.iterations.back().value;
    result.iterations.push_back(std::move(it));
    result.final_horizon = h;
    if (options.clear_caches) s.clear_caches();
    if (same) {
      result.converged = true;
      break;
    }
  }
  return result;
}

void check_state(const Dcmdp& m, const Assignment& s) {
  const VarRegistry& vars = m.vars();
  for (VarId b : m.bvars) {
    const Rational* v = s.get(b);
    if (!v) throw Error("state does not assign '" + vars.display_name(b) + "'");
    if (*v != 0 && *v != 1) throw Error("boolean '" + vars.display_name(b) + "' must be 0 or 1");
  }
  for (VarId x : m.cvars) {
    const Rational* v = s.get(x);
    if (!v) throw Error("state does not assign '" + vars.display_name(x) + "'");
    const VarInfo& info = vars.info(x);
    if (*v < info.lower || *v > info.upper)
      throw Error("'" + info.name + "' = " + to_string(*v) + " is outside [" + to_string(info.lower) + ", " +
                  to_string(info.upper) + "]");
  }
}

Rational value_at(const Dcmdp& m, const SolveResult& r, std::size_t h, const Assignment& s) {
  check_state(m, s);
  return m.store->evaluate(r.at(h).value, s);
}

std::string policy_at(const Dcmdp& m, const SolveResult& r, std::size_t h, const Assignment& s) {
  if (h == 0) throw Error("no policy at horizon 0");
  check_state(m, s);
  const Iteration& it = r.at(h);
  std::size_t best = 0;
  Rational best_value = m.store->evaluate(it.q[0], s);
  for (std::size_t i = 1; i < it.q.size(); ++i) {
    Rational v = m.store->evaluate(it.q[i], s);
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return m.actions[best].name;
}

}  // namespace xsdp
