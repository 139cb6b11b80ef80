#pragma once

// Text formats: the domain language (.dcmdp files), nested if-then-else
// case expressions, and flat case statements (one partition per line).
//
//   file      := "domain" IDENT decl* action+ settings?
//   decl      := "cvar" IDENT "[" NUM "," NUM "]"  |  "bvar" IDENT
//   action    := "action" IDENT "{" stmt* "}"
//   stmt      := IDENT "'" "=" case      continuous update
//              | IDENT "'" "~" case      P(b' = true)
//              | "reward" "=" case
//   case      := "(" "[" cond "]" case case ")"  |  "(" poly ")"  |  poly
//   cond      := poly REL poly  |  IDENT  |  IDENT "'"
//   settings  := ("discount" NUM)? ("horizon" (NUM | "inf"))?
//
// `#` starts a comment. Decimal literals are exact ("0.0002" is 1/5000),
// and `/` may divide by a constant.

#include "xsdp/model.hpp"

#include <string>
#include <string_view>

namespace xsdp {

struct SourceSpan {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;      // first column, 1-based
  std::size_t end_column = 0;  // one past the last column

  std::string to_string() const;
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, const std::string& message);
  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

Dcmdp parse_domain(std::string_view text, const std::string& file = "<input>");
Dcmdp load_domain(const std::string& path);

/// Builds the diagram of a nested case expression over variables already
/// declared in `store`. Primed variables are accepted.
NodeRef parse_case(Store& store, std::string_view text, const std::string& file = "<case>");

Polynomial parse_polynomial(const VarRegistry& vars, std::string_view text);

std::string serialize_domain(const Dcmdp& m);

/// Nested case expression for a diagram, as accepted by parse_case.
std::string case_expression(const Store& store, NodeRef f);

/// One "cond && cond : poly" line per root-to-leaf path; "true : poly" for a
/// terminal.
std::string to_case(const Store& store, NodeRef f);

/// Inverse of to_case. Partitions must be disjoint and cover the state
/// space; this is checked by linear feasibility when every atom is linear
/// and by sampling 10,000 in-bounds states otherwise. Throws ParseError.
NodeRef from_case(Store& store, std::string_view text);

}  // namespace xsdp
