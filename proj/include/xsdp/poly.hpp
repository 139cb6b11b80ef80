#pragma once

// Canonical sparse multivariate polynomials over exact rationals, the
// variable registry they index into, and the decision atoms (boolean
// variables and normalized polynomial inequalities) used by diagrams.

#include "xsdp/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace xsdp {

struct VarId {
  std::uint32_t index = 0;
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

enum class VarKind { boolean, continuous };

struct VarInfo {
  std::string name;
  VarKind kind = VarKind::continuous;
  bool primed = false;
  Rational lower = 0;  // continuous only
  Rational upper = 0;
};

/// Owns the set of state variables. Every declared variable gets a primed
/// twin; the index order of registration is the global variable order used
/// for monomials.
class VarRegistry {
 public:
  /// Registers `name` and `name'`. Returns the unprimed id.
  VarId declare_continuous(const std::string& name, const Rational& lower, const Rational& upper);
  VarId declare_boolean(const std::string& name);

  std::optional<VarId> find(std::string_view name, bool primed = false) const;
  const VarInfo& info(VarId v) const { return vars_.at(v.index); }
  VarId primed(VarId v) const;
  VarId unprimed(VarId v) const;
  bool is_boolean(VarId v) const { return info(v).kind == VarKind::boolean; }
  bool is_primed(VarId v) const { return info(v).primed; }
  std::string display_name(VarId v) const;
  std::size_t size() const { return vars_.size(); }

  /// Unprimed variables of a kind, in declaration order.
  std::vector<VarId> state_vars(VarKind kind) const;

 private:
  VarId add(VarInfo info);

  std::vector<VarInfo> vars_;
  std::vector<VarId> twin_;
};

/// A (partial) assignment of values to variables. Booleans are stored as 0/1.
class Assignment {
 public:
  void set(VarId v, Rational value);
  void set_bool(VarId v, bool value) { set(v, value ? 1 : 0); }
  const Rational* get(VarId v) const;
  const Rational& at(VarId v, const VarRegistry* names = nullptr) const;
  bool has(VarId v) const { return get(v) != nullptr; }

 private:
  std::vector<std::optional<Rational>> values_;
};

/// Sparse power product: (variable, exponent > 0) pairs sorted by variable.
struct Monomial {
  std::vector<std::pair<VarId, std::uint32_t>> factors;

  std::uint32_t degree() const;
  bool is_one() const { return factors.empty(); }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Graded lexicographic order: higher total degree first, ties broken by
/// comparing exponents of variables in registration order. Returns >0 when
/// `a` precedes `b` in printed order.
int compare_grlex(const Monomial& a, const Monomial& b);

Monomial operator*(const Monomial& a, const Monomial& b);

class Polynomial {
 public:
  struct Term {
    Monomial monomial;
    Rational coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  Polynomial() = default;
  static Polynomial constant(const Rational& c);
  static Polynomial variable(VarId v);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Value of the constant term (0 if absent).
  Rational constant_term() const;
  std::uint32_t degree() const;
  bool is_linear() const { return degree() <= 1; }
  /// Leading coefficient in monomial order; zero polynomial yields 0.
  Rational leading_coeff() const;
  /// Coefficient of the degree-1 monomial in `v`.
  Rational linear_coeff(VarId v) const;
  std::set<VarId> variables() const;
  bool mentions(VarId v) const;

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  Polynomial operator-() const;
  Polynomial scaled(const Rational& c) const;
  Polynomial pow(std::uint32_t e) const;

  /// Simultaneous substitution. Throws Error if a replacement mentions a key.
  Polynomial substitute(const std::map<VarId, Polynomial>& sigma) const;

  /// Exact value. Throws Error on an unassigned variable.
  Rational evaluate(const Assignment& s, const VarRegistry* names = nullptr) const;

  std::string to_string(const VarRegistry& vars) const;
  std::size_t hash() const;
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  static Polynomial from_unsorted(std::vector<Term> terms);

  std::vector<Term> terms_;  // sorted by compare_grlex, descending
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial scale(const Polynomial& p, const Rational& c);

struct PolynomialHash {
  std::size_t operator()(const Polynomial& p) const { return p.hash(); }
};

enum class CmpOp { lt, le, gt, ge };

/// Atom of a decision node. For inequalities the meaning is `poly > 0`
/// (strict) or `poly >= 0`, with `poly` scaled to coprime integer
/// coefficients and a positive leading coefficient.
struct Decision {
  enum class Kind { boolean, inequality };

  Kind kind = Kind::inequality;
  VarId var{};
  Polynomial poly;
  bool strict = false;

  static Decision boolean(VarId v) { return Decision{Kind::boolean, v, {}, false}; }
  bool is_boolean() const { return kind == Kind::boolean; }
  bool is_linear() const { return is_boolean() || poly.is_linear(); }
  bool holds(const Assignment& s, const VarRegistry* names = nullptr) const;
  std::set<VarId> variables() const;
  /// "k + x1 > 100", or with `negated` the complementary comparison.
  std::string to_string(const VarRegistry& vars, bool negated = false) const;
  std::size_t hash() const;
  friend bool operator==(const Decision&, const Decision&) = default;
};

struct DecisionHash {
  std::size_t operator()(const Decision& d) const { return d.hash(); }
};

/// Stored decision plus orientation: the comparison holds iff
/// `decision` holds XOR `flipped`.
struct OrientedDecision {
  Decision decision;
  bool flipped = false;
};

/// `poly > 0` (strict) or `poly >= 0` in canonical form, or its truth value
/// if `poly` is constant.
std::variant<bool, OrientedDecision> normalize_inequality(const Polynomial& poly, bool strict);

/// Canonical decision for `lhs op rhs`. Throws Error when lhs - rhs is
/// constant; callers fold such comparisons themselves.
OrientedDecision normalize_cmp(const Polynomial& lhs, CmpOp op, const Polynomial& rhs);

bool compare(const Rational& lhs, CmpOp op, const Rational& rhs);

}  // namespace xsdp
