#pragma once

#include "xsdp/domlang.hpp"
#include "xsdp/model.hpp"
#include "xsdp/prune.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace xsdp::testing {

inline std::string domain_path(const std::string& file) { return std::string(XSDP_DOMAIN_DIR) + "/" + file; }

inline Rational q(long num, long den = 1) {
  Rational r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

/// Successor states of `a` from `s`, with their probabilities. Evaluates only
/// the model's primitive diagrams (CPTs, CSE trees) at the concrete state.
inline std::vector<std::pair<Rational, Assignment>> successors(const Dcmdp& m, const Action& a,
                                                               const Assignment& s) {
  const Store& store = *m.store;
  const VarRegistry& vars = m.vars();
  std::vector<std::pair<Rational, Assignment>> out;
  std::vector<Rational> p_true;
  for (VarId b : m.bvars) p_true.push_back(store.evaluate(m.cpt(a, b), s));
  const std::size_t n = m.bvars.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Rational p = 1;
    Assignment with_next = s;
    Assignment next;
    for (std::size_t i = 0; i < n; ++i) {
      const bool v = ((mask >> i) & 1U) != 0;
      p *= v ? p_true[i] : Rational(1 - p_true[i]);
      with_next.set_bool(vars.primed(m.bvars[i]), v);
      next.set_bool(m.bvars[i], v);
    }
    if (p == 0) continue;
    for (VarId x : m.cvars) next.set(x, store.evaluate(m.cse(a, x), with_next));
    out.emplace_back(p, std::move(next));
  }
  return out;
}

/// Exact finite-horizon expectimax: for deterministic models this is the
/// maximum over all action sequences of length h of sum gamma^t r_t.
inline Rational oracle_value(const Dcmdp& m, const Assignment& s, std::size_t h) {
  if (h == 0) return 0;
  Rational best;
  bool first = true;
  for (const Action& a : m.actions) {
    Rational v = m.store->evaluate(a.reward, s);
    Rational future = 0;
    for (const auto& [p, next] : successors(m, a, s)) future += p * oracle_value(m, next, h - 1);
    v += m.discount * future;
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

/// Best two-step knapsack value, "both items fit" checked first.
inline Rational knapsack_closed_form(const Rational& k, const Rational& x1, const Rational& x2) {
  if (x1 + x2 + k <= 100) return x1 + x2;
  const bool fit1 = x1 + k <= 100;
  const bool fit2 = x2 + k <= 100;
  if (!fit1 && !fit2) return 0;
  if (!fit1) return x2;
  if (!fit2) return x1;
  return x2 > x1 ? x2 : x1;
}

/// Store with three continuous variables a, b, c on [-10, 10] and one
/// boolean f, plus generators of random small diagrams over them.
struct RandomDiagrams {
  Store store;
  VarId a, b, c, flag;
  std::mt19937_64 rng;
  std::vector<std::uint32_t> pool;

  explicit RandomDiagrams(std::uint64_t seed) : rng(seed) {
    a = store.vars().declare_continuous("a", -10, 10);
    b = store.vars().declare_continuous("b", -10, 10);
    c = store.vars().declare_continuous("c", -10, 10);
    flag = store.vars().declare_boolean("f");
  }

  long small(long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }
  Polynomial var(VarId v) const { return Polynomial::variable(v); }
  VarId any_var() { return std::vector<VarId>{a, b, c}[rng() % 3]; }

  Polynomial poly(int max_degree) {
    Polynomial p = Polynomial::constant(small(-5, 5));
    const int terms = static_cast<int>(small(0, 3));
    for (int i = 0; i < terms; ++i) {
      Polynomial m = Polynomial::constant(q(small(-4, 4), small(1, 3)));
      const int deg = static_cast<int>(small(1, max_degree));
      for (int d = 0; d < deg; ++d) m = m * var(any_var());
      p = p + m;
    }
    return p;
  }

  /// A fresh pool of up to `count` decisions (mostly linear, some quadratic,
  /// occasionally the boolean).
  void new_pool(std::size_t count) {
    pool.clear();
    for (std::size_t i = 0; i < count; ++i) {
      if (small(0, 7) == 0) {
        pool.push_back(store.bool_decision(flag));
        continue;
      }
      Polynomial lhs = small(0, 3) == 0 ? poly(2) : poly(1);
      if (lhs.is_constant()) lhs = lhs + var(any_var());
      auto norm = normalize_inequality(lhs, small(0, 1) == 1);
      if (std::holds_alternative<bool>(norm)) continue;
      pool.push_back(store.register_decision(std::get<OrientedDecision>(norm).decision));
    }
    if (pool.empty()) pool.push_back(store.bool_decision(flag));
  }

  NodeRef diagram(int depth) {
    if (depth == 0 || small(0, 4) == 0) return store.terminal(poly(2));
    const std::uint32_t d = pool[rng() % pool.size()];
    NodeRef hi = diagram(depth - 1);
    NodeRef lo = diagram(depth - 1);
    return store.ite(d, hi, lo);
  }

  Assignment point() {
    Assignment s;
    for (VarId v : {a, b, c}) s.set(v, q(small(-1000, 1000), 100));
    s.set_bool(flag, small(0, 1) == 1);
    return s;
  }
};

/// Independent feasibility check for the relaxed system: a nonempty
/// polytope inside a box has a vertex, so try every choice of n tight rows,
/// solve exactly, and test the candidate against all rows.
inline bool vertex_feasible(const ConstraintSet& cs) {
  std::vector<VarId> vars;
  for (const auto& [v, b] : cs.bounds) vars.push_back(v);
  const std::size_t n = vars.size();
  auto column = [&](VarId v) { return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin()); };
  // rows a.x <= rhs
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  for (const auto& c : cs.constraints) {
    std::vector<Rational> a(n, Rational(0));
    const Rational sign = c.truth ? -1 : 1;  // truth: p >= 0, i.e. -p <= 0
    for (const auto& t : c.poly.terms())
      if (!t.monomial.is_one()) a[column(t.monomial.factors[0].first)] = sign * t.coeff;
    rows.push_back(a);
    rhs.push_back(-sign * c.poly.constant_term());
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> up(n, Rational(0)), down(n, Rational(0));
    up[j] = 1;
    down[j] = -1;
    rows.push_back(up);
    rhs.push_back(cs.bounds.at(vars[j]).second);
    rows.push_back(down);
    rhs.push_back(-cs.bounds.at(vars[j]).first);
  }
  if (n == 0) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rhs[i] < 0) return false;
    return true;
  }
  const std::size_t m = rows.size();
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    // Gauss-Jordan on the picked rows
    std::vector<std::vector<Rational>> a;
    for (std::size_t i : pick) {
      auto r = rows[i];
      r.push_back(rhs[i]);
      a.push_back(r);
    }
    bool singular = false;
    for (std::size_t col = 0; col < n && !singular; ++col) {
      std::size_t piv = col;
      while (piv < n && a[piv][col] == 0) ++piv;
      if (piv == n) {
        singular = true;
        break;
      }
      std::swap(a[piv], a[col]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || a[r][col] == 0) continue;
        const Rational f = a[r][col] / a[col][col];
        for (std::size_t k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
      }
    }
    if (!singular) {
      std::vector<Rational> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = a[j][n] / a[j][j];
      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i) {
        Rational lhs = 0;
        for (std::size_t j = 0; j < n; ++j) lhs += rows[i][j] * x[j];
        ok = lhs <= rhs[i];
      }
      if (ok) return true;
    }
    // next combination
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == m - n + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
}

/// Random relaxed system over up to 4 variables and up to 8 constraints.
inline ConstraintSet random_system(std::mt19937_64& rng, VarRegistry& reg, const std::vector<VarId>& pool) {
  auto small = [&](long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  ConstraintSet cs;
  const std::size_t nv = 1 + rng() % pool.size();
  for (std::size_t j = 0; j < nv; ++j) {
    const long lo = small(-6, 3);
    cs.bounds[pool[j]] = {q(lo), q(lo + small(0, 8), 1)};
  }
  (void)reg;
  const std::size_t nc = rng() % 9;
  for (std::size_t i = 0; i < nc; ++i) {
    Polynomial p = Polynomial::constant(q(small(-12, 12), small(1, 3)));
    for (std::size_t j = 0; j < nv; ++j)
      if (small(0, 2) != 0) p = p + Polynomial::variable(pool[j]).scaled(q(small(-5, 5), small(1, 2)));
    cs.add(p, small(0, 1) == 1, small(0, 1) == 1);
  }
  return cs;
}

/// Two-boolean stochastic model with state-dependent CPTs and a CSE that
/// tests a next-state boolean, plus a value function over it.
constexpr const char* kToyDomain = R"(
domain toy
cvar x [0, 10]
bvar b1
bvar b2
action act {
  x' = ([b1'] (1/2 * x) (x))
  b1' ~ ([x > 5] (0.7) (1/20 * x))
  b2' ~ ([b1] (0.3) ([x <= 2] (0.9) (0.5)))
  reward = ([b2] (1) (0))
}
discount 0.9
)";
constexpr const char* kToyValue = "([b1] ([b2] (x) (2)) ([x >= 3] (1/10 * x^2) (5 - x)))";

/// Q for kToyDomain / kToyValue written out as the explicit 4-term sum.
inline Rational toy_q(bool b1, bool b2, const Rational& x) {
  const Rational p1 = x > 5 ? q(7, 10) : Rational(x / 20);
  const Rational p2 = b1 ? q(3, 10) : (x <= 2 ? q(9, 10) : q(1, 2));
  auto value = [](bool c1, bool c2, const Rational& y) -> Rational {
    if (c1) return c2 ? y : Rational(2);
    return y >= 3 ? Rational(y * y / 10) : Rational(5 - y);
  };
  Rational sum = 0;
  for (bool c1 : {true, false})
    for (bool c2 : {true, false}) {
      const Rational p = (c1 ? p1 : Rational(1 - p1)) * (c2 ? p2 : Rational(1 - p2));
      sum += p * value(c1, c2, c1 ? Rational(x / 2) : x);
    }
  return Rational(b2 ? 1 : 0) + q(9, 10) * sum;
}

inline Assignment state(const Dcmdp& m, std::initializer_list<std::pair<const char*, Rational>> values) {
  Assignment s;
  for (const auto& [name, v] : values) s.set(*m.vars().find(name), v);
  return s;
}

}  // namespace xsdp::testing
