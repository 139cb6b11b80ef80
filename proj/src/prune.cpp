#include "xsdp/prune.hpp"

#include <algorithm>

namespace xsdp {

ConstraintSet ConstraintSet::with_bounds(const VarRegistry& vars) {
  ConstraintSet cs;
  for (std::uint32_t i = 0; i < vars.size(); ++i) {
    const VarInfo& info = vars.info(VarId{i});
    if (info.kind == VarKind::continuous) cs.bounds.emplace(VarId{i}, std::make_pair(info.lower, info.upper));
  }
  return cs;
}

namespace {

// Phase-one simplex on  A y <= r,  y >= 0  with Bland's rule. Returns whether
// the minimum total infeasibility is zero.
bool phase_one(std::vector<std::vector<Rational>> a, std::vector<Rational> r) {
  const std::size_t m = a.size();
  if (m == 0) return true;
  const std::size_t n = a.front().size();

  // columns: structural [0,n), slack [n, n+m), artificial [n+m, n+m+k)
  std::vector<std::size_t> art_rows;
  for (std::size_t i = 0; i < m; ++i)
    if (r[i] < 0) art_rows.push_back(i);
  if (art_rows.empty()) return true;

  const std::size_t cols = n + m + art_rows.size();
  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(cols, Rational(0)));
  std::vector<Rational> rhs(m);
  std::vector<std::size_t> basis(m);
  std::size_t next_art = n + m;
  for (std::size_t i = 0; i < m; ++i) {
    const bool neg = r[i] < 0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = neg ? Rational(-a[i][j]) : a[i][j];
    t[i][n + i] = neg ? -1 : 1;
    rhs[i] = neg ? Rational(-r[i]) : r[i];
    if (neg) {
      t[i][next_art] = 1;
      basis[i] = next_art++;
    } else {
      basis[i] = n + i;
    }
  }
  auto is_art = [&](std::size_t col) { return col >= n + m; };

  // reduced costs of the phase-one objective (sum of artificials)
  std::vector<Rational> cost(cols, Rational(0));
  Rational value = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!is_art(basis[i])) continue;
    for (std::size_t j = 0; j < cols; ++j)
      if (!is_art(j)) cost[j] -= t[i][j];
    value += rhs[i];
  }

  while (true) {
    if (value == 0) return true;
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (sgn(cost[j]) < 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols) return false;

    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(t[i][enter]) <= 0) continue;
      Rational ratio = rhs[i] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) return false;  // unbounded; cannot happen for phase one

    const Rational pivot = t[leave][enter];
    for (auto& x : t[leave]) x /= pivot;
    rhs[leave] /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || sgn(t[i][enter]) == 0) continue;
      const Rational f = t[i][enter];
      for (std::size_t j = 0; j < cols; ++j)
        if (sgn(t[leave][j]) != 0) t[i][j] -= f * t[leave][j];
      rhs[i] -= f * rhs[leave];
    }
    if (sgn(cost[enter]) != 0) {
      const Rational f = cost[enter];
      for (std::size_t j = 0; j < cols; ++j)
        if (sgn(t[leave][j]) != 0) cost[j] -= f * t[leave][j];
      value += f * rhs[leave];
    }
    basis[leave] = enter;
  }
}

}  // namespace

bool feasible(const ConstraintSet& cs) {
  // columns for the variables that actually occur
  std::map<VarId, std::size_t> column;
  for (const auto& c : cs.constraints) {
    if (!c.poly.is_linear()) throw Error("feasibility check on a nonlinear constraint");
    for (VarId v : c.poly.variables()) column.emplace(v, 0);
  }
  std::size_t n = 0;
  for (auto& [v, col] : column) {
    if (cs.bounds.count(v) == 0) throw Error("feasibility check on a variable without bounds");
    col = n++;
  }

  // x = L + y with 0 <= y <= U - L; each constraint becomes  a.y <= r
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> r;
  for (const auto& c : cs.constraints) {
    // asserted:  p >= 0 (true) or  -p >= 0 (false); strictness relaxed
    const Polynomial p = c.truth ? c.poly : -c.poly;
    std::vector<Rational> row(n, Rational(0));
    Rational constant = p.constant_term();
    for (const auto& [v, col] : column) {
      Rational coef = p.linear_coeff(v);
      constant += coef * cs.bounds.at(v).first;
      row[col] = -coef;
    }
    if (n == 0) {
      if (constant < 0) return false;
      continue;
    }
    a.push_back(std::move(row));
    r.push_back(constant);  // -a.y <= const  <=>  a.y + const >= 0
  }
  for (const auto& [v, col] : column) {
    const auto& [lo, hi] = cs.bounds.at(v);
    if (hi < lo) return false;
    std::vector<Rational> row(n, Rational(0));
    row[col] = 1;
    a.push_back(std::move(row));
    r.push_back(hi - lo);
  }
  return phase_one(std::move(a), std::move(r));
}

// ------------------------------------------------------------------ Pruner

Pruner::Pruner(Store& store) : store_(store), base_(ConstraintSet::with_bounds(store.vars())) {}

bool Pruner::path_feasible(const Path& path) {
  if (auto it = lp_cache_.find(path); it != lp_cache_.end()) return it->second;
  ConstraintSet cs;
  cs.bounds = base_.bounds;
  for (const auto& [d, truth] : path) {
    const Decision& dec = store_.decision(d);
    cs.add(dec.poly, dec.strict, truth);
  }
  ++lp_calls_;
  const bool ok = feasible(cs);
  lp_cache_.emplace(path, ok);
  return ok;
}

NodeRef Pruner::visit(NodeRef n, Path& path) {
  if (store_.is_terminal(n)) return n;
  auto key = std::make_pair(n.id, path);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const std::uint32_t d = store_.decision_of(n);
  const Decision& dec = store_.decision(d);
  NodeRef result;
  if (dec.is_boolean() || !dec.poly.is_linear()) {
    NodeRef hi = visit(store_.high(n), path);
    NodeRef lo = visit(store_.low(n), path);
    result = store_.fragment(d, hi, lo);
  } else {
    auto with = [&](bool truth) {
      Path p = path;
      p.insert(std::lower_bound(p.begin(), p.end(), std::make_pair(d, truth)), {d, truth});
      return p;
    };
    Path on_true = with(true);
    Path on_false = with(false);
    const bool hi_ok = path_feasible(on_true);
    const bool lo_ok = path_feasible(on_false);
    if (hi_ok && !lo_ok) {
      result = visit(store_.high(n), on_true);
    } else if (!hi_ok && lo_ok) {
      result = visit(store_.low(n), on_false);
    } else {
      // both feasible, or the path itself is empty and either child will do
      NodeRef hi = visit(store_.high(n), on_true);
      NodeRef lo = visit(store_.low(n), on_false);
      result = store_.fragment(d, hi, lo);
    }
  }
  memo_.emplace(std::move(key), result);
  return result;
}

NodeRef Pruner::prune_pass(NodeRef f) {
  memo_.clear();
  Path path;
  return visit(f, path);
}

NodeRef Pruner::prune(NodeRef f) {
  if (!store_.is_ordered(f)) f = store_.reorder(f);
  // Repeat until stable: a node shared between paths can become prunable
  // once its other contexts disappear. Keep the smaller diagram if a pass
  // would unshare nodes and grow.
  std::size_t size = store_.node_count(f);
  while (true) {
    NodeRef g = prune_pass(f);
    if (g == f) return f;
    const std::size_t gsize = store_.node_count(g);
    if (gsize > size) return f;
    f = g;
    size = gsize;
  }
}

NodeRef prune(Store& store, NodeRef f) { return Pruner(store).prune(f); }

}  // namespace xsdp
