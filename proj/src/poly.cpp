#include "xsdp/poly.hpp"

#include <algorithm>
#include <numeric>

namespace xsdp {

// ---------------------------------------------------------------- registry

VarId VarRegistry::add(VarInfo info) {
  VarId id{static_cast<std::uint32_t>(vars_.size())};
  vars_.push_back(std::move(info));
  twin_.push_back(id);
  return id;
}

VarId VarRegistry::declare_continuous(const std::string& name, const Rational& lower,
                                      const Rational& upper) {
  if (find(name)) throw Error("duplicate variable '" + name + "'");
  if (lower > upper) throw Error("inverted bounds for '" + name + "'");
  VarId v = add({name, VarKind::continuous, false, lower, upper});
  VarId p = add({name, VarKind::continuous, true, lower, upper});
  twin_[v.index] = p;
  twin_[p.index] = v;
  return v;
}

VarId VarRegistry::declare_boolean(const std::string& name) {
  if (find(name)) throw Error("duplicate variable '" + name + "'");
  VarId v = add({name, VarKind::boolean, false, 0, 1});
  VarId p = add({name, VarKind::boolean, true, 0, 1});
  twin_[v.index] = p;
  twin_[p.index] = v;
  return v;
}

std::optional<VarId> VarRegistry::find(std::string_view name, bool primed) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name && vars_[i].primed == primed) return VarId{static_cast<std::uint32_t>(i)};
  return std::nullopt;
}

VarId VarRegistry::primed(VarId v) const { return is_primed(v) ? v : twin_.at(v.index); }
VarId VarRegistry::unprimed(VarId v) const { return is_primed(v) ? twin_.at(v.index) : v; }

std::string VarRegistry::display_name(VarId v) const {
  const VarInfo& i = info(v);
  return i.primed ? i.name + "'" : i.name;
}

std::vector<VarId> VarRegistry::state_vars(VarKind kind) const {
  std::vector<VarId> out;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (!vars_[i].primed && vars_[i].kind == kind) out.push_back(VarId{static_cast<std::uint32_t>(i)});
  return out;
}

// -------------------------------------------------------------- assignment

void Assignment::set(VarId v, Rational value) {
  if (values_.size() <= v.index) values_.resize(v.index + 1);
  values_[v.index] = std::move(value);
}

const Rational* Assignment::get(VarId v) const {
  if (v.index >= values_.size() || !values_[v.index]) return nullptr;
  return &*values_[v.index];
}

const Rational& Assignment::at(VarId v, const VarRegistry* names) const {
  if (const Rational* r = get(v)) return *r;
  std::string name = names ? names->display_name(v) : "#" + std::to_string(v.index);
  throw Error("unassigned variable '" + name + "'");
}

// ---------------------------------------------------------------- monomial

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (const auto& f : factors) d += f.second;
  return d;
}

int compare_grlex(const Monomial& a, const Monomial& b) {
  const auto da = a.degree();
  const auto db = b.degree();
  if (da != db) return da > db ? 1 : -1;
  std::size_t i = 0;
  for (; i < a.factors.size() && i < b.factors.size(); ++i) {
    const auto& [va, ea] = a.factors[i];
    const auto& [vb, eb] = b.factors[i];
    if (va != vb) return va < vb ? 1 : -1;
    if (ea != eb) return ea > eb ? 1 : -1;
  }
  if (i < a.factors.size()) return 1;
  if (i < b.factors.size()) return -1;
  return 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors.reserve(a.factors.size() + b.factors.size());
  std::size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size() || (i < a.factors.size() && a.factors[i].first < b.factors[j].first)) {
      out.factors.push_back(a.factors[i++]);
    } else if (i == a.factors.size() || b.factors[j].first < a.factors[i].first) {
      out.factors.push_back(b.factors[j++]);
    } else {
      out.factors.emplace_back(a.factors[i].first, a.factors[i].second + b.factors[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

// -------------------------------------------------------------- polynomial

Polynomial Polynomial::constant(const Rational& c) {
  Polynomial p;
  if (c != 0) p.terms_.push_back({Monomial{}, c});
  return p;
}

Polynomial Polynomial::variable(VarId v) {
  Polynomial p;
  p.terms_.push_back({Monomial{{{v, 1}}}, Rational(1)});
  return p;
}

Polynomial Polynomial::from_unsorted(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return compare_grlex(a.monomial, b.monomial) > 0; });
  Polynomial p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
      p.terms_.back().coeff += t.coeff;
      if (p.terms_.back().coeff == 0) p.terms_.pop_back();
    } else if (t.coeff != 0) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().monomial.is_one());
}

Rational Polynomial::constant_term() const {
  if (!terms_.empty() && terms_.back().monomial.is_one()) return terms_.back().coeff;
  return 0;
}

std::uint32_t Polynomial::degree() const {
  return terms_.empty() ? 0 : terms_.front().monomial.degree();
}

Rational Polynomial::leading_coeff() const {
  return terms_.empty() ? Rational(0) : terms_.front().coeff;
}

Rational Polynomial::linear_coeff(VarId v) const {
  for (const auto& t : terms_)
    if (t.monomial.factors.size() == 1 && t.monomial.factors[0] == std::pair<VarId, std::uint32_t>{v, 1})
      return t.coeff;
  return 0;
}

std::set<VarId> Polynomial::variables() const {
  std::set<VarId> out;
  for (const auto& t : terms_)
    for (const auto& f : t.monomial.factors) out.insert(f.first);
  return out;
}

bool Polynomial::mentions(VarId v) const {
  for (const auto& t : terms_)
    for (const auto& f : t.monomial.factors)
      if (f.first == v) return true;
  return false;
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  Polynomial out;
  out.terms_.reserve(p.terms_.size() + q.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < p.terms_.size() || j < q.terms_.size()) {
    int c = 0;
    if (i == p.terms_.size()) c = -1;
    else if (j == q.terms_.size()) c = 1;
    else c = compare_grlex(p.terms_[i].monomial, q.terms_[j].monomial);
    if (c > 0) {
      out.terms_.push_back(p.terms_[i++]);
    } else if (c < 0) {
      out.terms_.push_back(q.terms_[j++]);
    } else {
      Rational s = p.terms_[i].coeff + q.terms_[j].coeff;
      if (s != 0) out.terms_.push_back({p.terms_[i].monomial, std::move(s)});
      ++i;
      ++j;
    }
  }
  return out;
}

Polynomial Polynomial::operator-() const { return scaled(-1); }

Polynomial operator-(const Polynomial& p, const Polynomial& q) { return p + (-q); }

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) return {};
  std::vector<Polynomial::Term> terms;
  terms.reserve(p.terms_.size() * q.terms_.size());
  for (const auto& a : p.terms_)
    for (const auto& b : q.terms_) terms.push_back({a.monomial * b.monomial, a.coeff * b.coeff});
  return Polynomial::from_unsorted(std::move(terms));
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (c == 0) return {};
  Polynomial out = *this;
  for (auto& t : out.terms_) t.coeff *= c;
  return out;
}

Polynomial Polynomial::pow(std::uint32_t e) const {
  Polynomial result = constant(1);
  Polynomial base = *this;
  while (e != 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e != 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::substitute(const std::map<VarId, Polynomial>& sigma) const {
  if (sigma.empty()) return *this;
  for (const auto& [key, repl] : sigma)
    for (const auto& [other, _] : sigma)
      if (repl.mentions(other))
        throw Error("substitution is not disjoint: a replacement mentions a substituted variable");
  bool touched = false;
  for (const auto& [key, _] : sigma) touched = touched || mentions(key);
  if (!touched) return *this;

  Polynomial out;
  for (const auto& t : terms_) {
    Polynomial kept = constant(t.coeff);
    Monomial rest;
    for (const auto& [v, e] : t.monomial.factors) {
      auto it = sigma.find(v);
      if (it == sigma.end()) rest.factors.emplace_back(v, e);
      else kept = kept * it->second.pow(e);
    }
    Polynomial r;
    r.terms_.push_back({std::move(rest), Rational(1)});
    out = out + kept * r;
  }
  return out;
}

Rational Polynomial::evaluate(const Assignment& s, const VarRegistry* names) const {
  Rational total = 0;
  for (const auto& t : terms_) {
    Rational v = t.coeff;
    for (const auto& [var, e] : t.monomial.factors) {
      const Rational& x = s.at(var, names);
      for (std::uint32_t k = 0; k < e; ++k) v *= x;
    }
    total += v;
  }
  return total;
}

namespace {

std::string monomial_string(const Monomial& m, const VarRegistry& vars) {
  std::string out;
  for (const auto& [v, e] : m.factors) {
    if (!out.empty()) out += '*';
    out += vars.display_name(v);
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

}  // namespace

std::string Polynomial::to_string(const VarRegistry& vars) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    Rational mag = abs(t.coeff);
    if (first) {
      if (sgn(t.coeff) < 0) out += '-';
    } else {
      out += sgn(t.coeff) < 0 ? " - " : " + ";
    }
    first = false;
    if (t.monomial.is_one()) {
      out += xsdp::to_string(mag);
    } else {
      if (mag != 1) out += xsdp::to_string(mag) + "*";
      out += monomial_string(t.monomial, vars);
    }
  }
  return out;
}

std::size_t Polynomial::hash() const {
  std::size_t seed = terms_.size();
  for (const auto& t : terms_) {
    for (const auto& [v, e] : t.monomial.factors) {
      hash_combine(seed, v.index);
      hash_combine(seed, e);
    }
    hash_combine(seed, 0xabcdef);
    hash_combine(seed, hash_value(t.coeff));
  }
  return seed;
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }
Polynomial scale(const Polynomial& p, const Rational& c) { return p.scaled(c); }

// ---------------------------------------------------------------- decision

bool Decision::holds(const Assignment& s, const VarRegistry* names) const {
  if (is_boolean()) return s.at(var, names) != 0;
  Rational v = poly.evaluate(s, names);
  return strict ? v > 0 : v >= 0;
}

std::set<VarId> Decision::variables() const {
  if (is_boolean()) return {var};
  return poly.variables();
}

std::string Decision::to_string(const VarRegistry& vars, bool negated) const {
  if (is_boolean()) return negated ? "!" + vars.display_name(var) : vars.display_name(var);
  Rational c = poly.constant_term();
  Polynomial lhs = poly - Polynomial::constant(c);
  const char* rel = strict ? (negated ? "<=" : ">") : (negated ? "<" : ">=");
  return lhs.to_string(vars) + " " + rel + " " + xsdp::to_string(Rational(-c));
}

std::size_t Decision::hash() const {
  std::size_t seed = is_boolean() ? 1 : 2;
  if (is_boolean()) {
    hash_combine(seed, var.index);
  } else {
    hash_combine(seed, poly.hash());
    hash_combine(seed, strict ? 7 : 3);
  }
  return seed;
}

std::variant<bool, OrientedDecision> normalize_inequality(const Polynomial& poly, bool strict) {
  if (poly.is_constant()) {
    Rational c = poly.constant_term();
    return strict ? c > 0 : c >= 0;
  }
  // scale to coprime integers: multiply by lcm of denominators, divide by
  // gcd of numerators
  mpz_class lcm = 1;
  mpz_class gcd = 0;
  for (const auto& t : poly.terms()) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), t.coeff.get_den_mpz_t());
  for (const auto& t : poly.terms()) {
    mpz_class n = t.coeff.get_num() * (lcm / t.coeff.get_den());
    mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), n.get_mpz_t());
  }
  Rational factor(lcm, gcd);
  factor.canonicalize();
  Polynomial p = poly.scaled(factor);
  OrientedDecision out;
  out.decision.kind = Decision::Kind::inequality;
  if (sgn(p.leading_coeff()) < 0) {
    // p > 0  <=>  !(-p >= 0);   p >= 0  <=>  !(-p > 0)
    out.decision.poly = -p;
    out.decision.strict = !strict;
    out.flipped = true;
  } else {
    out.decision.poly = std::move(p);
    out.decision.strict = strict;
  }
  return out;
}

OrientedDecision normalize_cmp(const Polynomial& lhs, CmpOp op, const Polynomial& rhs) {
  Polynomial diff;
  bool strict = false;
  switch (op) {
    case CmpOp::gt: diff = lhs - rhs; strict = true; break;
    case CmpOp::ge: diff = lhs - rhs; strict = false; break;
    case CmpOp::lt: diff = rhs - lhs; strict = true; break;
    case CmpOp::le: diff = rhs - lhs; strict = false; break;
  }
  auto r = normalize_inequality(diff, strict);
  if (std::holds_alternative<bool>(r)) throw Error("comparison between constants");
  return std::get<OrientedDecision>(std::move(r));
}

bool compare(const Rational& lhs, CmpOp op, const Rational& rhs) {
  switch (op) {
    case CmpOp::lt: return lhs < rhs;
    case CmpOp::le: return lhs <= rhs;
    case CmpOp::gt: return lhs > rhs;
    case CmpOp::ge: return lhs >= rhs;
  }
  return false;
}

}  // namespace xsdp
