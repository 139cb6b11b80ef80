#include "xsdp/domlang.hpp"

#include "xsdp/prune.hpp"

#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

namespace xsdp {

std::string SourceSpan::to_string() const {
  return file + ":" + std::to_string(line) + ":" + std::to_string(column);
}

ParseError::ParseError(SourceSpan span, const std::string& message)
    : Error(span.to_string() + ": " + message), span_(std::move(span)), message_(message) {}

namespace {

constexpr int kMaxDepth = 256;
constexpr std::uint32_t kMaxDegree = 64;

enum class Tok {
  ident, number, lparen, rparen, lbrack, rbrack, lbrace, rbrace, comma, prime, assign, tilde,
  plus, minus, star, slash, caret, lt, le, gt, ge, colon, conj, bang, top, end
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourceSpan span;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrack: return "'['";
    case Tok::rbrack: return "']'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::comma: return "','";
    case Tok::prime: return "'''";
    case Tok::assign: return "'='";
    case Tok::tilde: return "'~'";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::star: return "'*'";
    case Tok::slash: return "'/'";
    case Tok::caret: return "'^'";
    case Tok::lt: return "'<'";
    case Tok::le: return "'<='";
    case Tok::gt: return "'>'";
    case Tok::ge: return "'>='";
    case Tok::colon: return "':'";
    case Tok::conj: return "'&&'";
    case Tok::bang: return "'!'";
    case Tok::top: return "'true'";
    case Tok::end: return "end of input";
  }
  return "token";
}

std::vector<Token> lex(std::string_view text, const std::string& file) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t line_start = 0;
  std::size_t i = 0;
  auto span = [&](std::size_t b, std::size_t e) {
    return SourceSpan{file, line, b - line_start + 1, e - line_start + 1};
  };
  auto push = [&](Tok k, std::size_t b, std::size_t e) {
    out.push_back({k, std::string(text.substr(b, e - b)), span(b, e)});
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      line_start = ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const std::size_t b = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      if (text.substr(b, i - b) == "true") push(Tok::top, b, i);
      else push(Tok::ident, b, i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < text.size() &&
                                                        std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      bool point = false;
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || (text[i] == '.' && !point))) {
        if (text[i] == '.') point = true;
        ++i;
      }
      push(Tok::number, b, i);
      continue;
    }
    auto two = [&](char next) { return i + 1 < text.size() && text[i + 1] == next; };
    auto utf8 = [&](std::string_view seq) { return text.substr(i, seq.size()) == seq; };
    Tok k;
    std::size_t len = 1;
    switch (c) {
      case '(': k = Tok::lparen; break;
      case ')': k = Tok::rparen; break;
      case '[': k = Tok::lbrack; break;
      case ']': k = Tok::rbrack; break;
      case '{': k = Tok::lbrace; break;
      case '}': k = Tok::rbrace; break;
      case ',': k = Tok::comma; break;
      case '\'': k = Tok::prime; break;
      case '=': k = Tok::assign; break;
      case '~': k = Tok::tilde; break;
      case '+': k = Tok::plus; break;
      case '-': k = Tok::minus; break;
      case '*': k = Tok::star; break;
      case '/': k = Tok::slash; break;
      case '^': k = Tok::caret; break;
      case ':': k = Tok::colon; break;
      case '!': k = Tok::bang; break;
      case '<':
        k = two('=') ? Tok::le : Tok::lt;
        len = two('=') ? 2 : 1;
        break;
      case '>':
        k = two('=') ? Tok::ge : Tok::gt;
        len = two('=') ? 2 : 1;
        break;
      case '&':
        if (!two('&')) throw ParseError(span(b, b + 1), "expected '&&'");
        k = Tok::conj;
        len = 2;
        break;
      default:
        if (utf8("⊤")) {  // ⊤
          k = Tok::top;
          len = 3;
        } else if (utf8("∧")) {  // ∧
          k = Tok::conj;
          len = 3;
        } else if (utf8("¬")) {  // ¬
          k = Tok::bang;
          len = 2;
        } else if (utf8("≤")) {  // ≤
          k = Tok::le;
          len = 3;
        } else if (utf8("≥")) {  // ≥
          k = Tok::ge;
          len = 3;
        } else {
          throw ParseError(span(b, b + 1), "unexpected character '" + std::string(1, c) + "'");
        }
    }
    i += len;
    push(k, b, i);
  }
  out.push_back({Tok::end, "", span(i, i)});
  return out;
}

bool is_reserved(const std::string& s) {
  static const char* const words[] = {"domain", "cvar",    "bvar", "action", "reward",
                                      "discount", "horizon", "inf",  "true",   "false"};
  for (const char* w : words)
    if (s == w) return true;
  return false;
}

/// Which next-state variables may appear where.
struct Rules {
  bool primed_boolean_in_conditions = true;
  bool primed_continuous_in_conditions = true;
  bool primed_in_leaves = true;
  bool probability_leaves = false;
  const char* context = "expression";
};

class Parser {
 public:
  Parser(std::string_view text, std::string file, Store* store, const VarRegistry* vars)
      : tokens_(lex(text, file)), file_(std::move(file)), store_(store), vars_(vars) {}

  // ------------------------------------------------------------ tokens
  const Token& peek(std::size_t k = 0) const {
    return tokens_[std::min(pos_ + k, tokens_.size() - 1)];
  }
  Token next() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::ident) && peek().text == w; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  Token expect(Tok k, const char* what = nullptr) {
    if (!at(k))
      fail(peek(), std::string("expected ") + (what ? what : describe(k)) + ", found " + found(peek()));
    return next();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail(peek(), "expected '" + std::string(w) + "', found " + found(peek()));
    next();
  }
  static std::string found(const Token& t) {
    return t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
  }
  [[noreturn]] static void fail(const Token& t, const std::string& message) { throw ParseError(t.span, message); }
  [[noreturn]] static void fail(const SourceSpan& s, const std::string& message) { throw ParseError(s, message); }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) fail(p.peek(), "expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  // ------------------------------------------------------- polynomials
  Polynomial expr() {
    DepthGuard guard(*this);
    Polynomial p = term();
    while (at(Tok::plus) || at(Tok::minus)) {
      const bool minus = next().kind == Tok::minus;
      Polynomial q = term();
      p = minus ? p - q : p + q;
    }
    return p;
  }

  Polynomial term() {
    Polynomial p = unary();
    while (at(Tok::star) || at(Tok::slash)) {
      const Token op = next();
      const Token rhs_start = peek();
      Polynomial q = unary();
      if (op.kind == Tok::star) {
        if (p.degree() + q.degree() > kMaxDegree) fail(op, "polynomial degree too large");
        p = p * q;
      } else {
        if (!q.is_constant()) fail(rhs_start, "division by a non-constant expression");
        if (q.is_zero()) fail(rhs_start, "division by zero");
        p = p.scaled(1 / q.constant_term());
      }
    }
    return p;
  }

  Polynomial unary() {
    DepthGuard guard(*this);
    if (accept(Tok::minus)) return -unary();
    if (accept(Tok::plus)) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (!at(Tok::caret)) return base;
    next();
    const Token e = expect(Tok::number, "integer exponent");
    if (e.text.find('.') != std::string::npos) fail(e, "exponent must be a positive integer");
    if (e.text.size() > 3) fail(e, "exponent too large");
    const auto n = static_cast<std::uint32_t>(std::stoul(e.text));
    if (n == 0) fail(e, "exponent must be a positive integer");
    if (static_cast<std::uint64_t>(base.degree()) * n > kMaxDegree) fail(e, "polynomial degree too large");
    return base.pow(n);
  }

  Polynomial primary() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::number: next(); return Polynomial::constant(number(t));
      case Tok::lparen: {
        next();
        Polynomial p = expr();
        expect(Tok::rparen);
        return p;
      }
      case Tok::ident: {
        next();
        const bool primed = accept(Tok::prime);
        return Polynomial::variable(continuous_var(t, primed));
      }
      default: fail(t, "expected a polynomial, found " + found(t));
    }
  }

  static Rational number(const Token& t) {
    try {
      return parse_decimal(t.text);
    } catch (const Error& e) {
      fail(t, e.what());
    }
  }

  VarId continuous_var(const Token& t, bool primed) {
    auto v = vars_->find(t.text, primed);
    if (!v) {
      if (vars_->find(t.text, !primed)) fail(t, "variable '" + t.text + "' cannot be primed here");
      fail(t, "unknown variable '" + t.text + "'");
    }
    if (vars_->is_boolean(*v)) fail(t, "boolean variable '" + t.text + "' used inside a polynomial");
    if (primed) {
      if (in_condition_ && !rules_.primed_continuous_in_conditions)
        fail(t, std::string(rules_.context) + " condition references primed continuous variable '" + t.text + "''");
      if (!in_condition_ && !rules_.primed_in_leaves)
        fail(t, std::string(rules_.context) + " value references next-state variable '" + t.text + "''");
    }
    return *v;
  }

  /// ['-'] NUM ['/' NUM]
  Rational signed_literal() {
    const Token start = peek();
    const bool neg = accept(Tok::minus);
    Rational q = number(expect(Tok::number));
    if (accept(Tok::slash)) {
      const Token d = expect(Tok::number);
      Rational den = number(d);
      if (den == 0) fail(d, "division by zero");
      q /= den;
    }
    (void)start;
    return neg ? Rational(-q) : q;
  }

  // ------------------------------------------------------- conditions
  struct Cond {
    std::variant<bool, OrientedDecision> value;
  };

  bool is_boolean_name(const Token& t) const {
    if (t.kind != Tok::ident) return false;
    auto v = vars_->find(t.text);
    return v && vars_->is_boolean(*v);
  }

  Cond boolean_atom() {
    const Token t = next();
    const bool primed = accept(Tok::prime);
    auto v = vars_->find(t.text, primed);
    if (!v) fail(t, "unknown variable '" + t.text + "'");
    if (primed && !rules_.primed_boolean_in_conditions)
      fail(t, std::string(rules_.context) + " condition references next-state variable '" + t.text + "''");
    return Cond{OrientedDecision{Decision::boolean(*v), false}};
  }

  Cond comparison() {
    in_condition_ = true;
    const Token start = peek();
    Polynomial lhs = expr();
    const Token rel = next();
    CmpOp op;
    switch (rel.kind) {
      case Tok::lt: op = CmpOp::lt; break;
      case Tok::le: op = CmpOp::le; break;
      case Tok::gt: op = CmpOp::gt; break;
      case Tok::ge: op = CmpOp::ge; break;
      case Tok::assign: fail(rel, "equality conditions are not supported");
      default: fail(rel, "expected a comparison (<, <=, >, >=), found " + found(rel));
    }
    Polynomial rhs = expr();
    in_condition_ = false;
    Polynomial diff = lhs - rhs;
    if (diff.is_constant()) return Cond{compare(lhs.constant_term(), op, rhs.constant_term())};
    (void)start;
    return Cond{normalize_cmp(lhs, op, rhs)};
  }

  Cond condition() {
    if (is_boolean_name(peek())) return boolean_atom();
    return comparison();
  }

  // Registered before the branches are parsed, so decision order follows
  // first appearance in the text.
  std::optional<std::uint32_t> register_cond(const Cond& c) {
    if (std::holds_alternative<bool>(c.value)) return std::nullopt;
    return store_->register_decision(std::get<OrientedDecision>(c.value).decision);
  }

  NodeRef build(const Cond& c, std::optional<std::uint32_t> id, NodeRef hi, NodeRef lo) {
    if (!id) return std::get<bool>(c.value) ? hi : lo;
    return std::get<OrientedDecision>(c.value).flipped ? store_->ite(*id, lo, hi) : store_->ite(*id, hi, lo);
  }

  // ------------------------------------------------------------- cases
  NodeRef case_expr() {
    DepthGuard guard(*this);
    if (at(Tok::lparen) && peek(1).kind == Tok::lbrack) {
      next();
      next();
      Cond c = condition();
      expect(Tok::rbrack);
      const auto id = register_cond(c);
      NodeRef hi = case_expr();
      NodeRef lo = case_expr();
      expect(Tok::rparen, "')' closing the conditional");
      return build(c, id, hi, lo);
    }
    const Token start = peek();
    Polynomial p = expr();
    if (rules_.probability_leaves && p.is_constant()) {
      const Rational c = p.constant_term();
      if (c < 0 || c > 1)
        fail(SourceSpan{file_, start.span.line, start.span.column, peek().span.column},
             "probability out of [0,1] (" + to_string(c) + ")");
    }
    return store_->terminal(p);
  }

  NodeRef whole_case() {
    NodeRef r = case_expr();
    expect(Tok::end);
    return r;
  }

  Polynomial whole_polynomial() {
    Polynomial p = expr();
    expect(Tok::end);
    return p;
  }

  // ------------------------------------------------- flat case partitions
  /// "atom && atom ... : poly" or "true : poly"; returns the partition's
  /// indicator and value.
  std::pair<NodeRef, NodeRef> partition() {
    NodeRef guard = store_->one();
    if (!accept(Tok::top)) {
      do {
        Cond c;
        bool negate = false;
        if (accept(Tok::bang)) {
          if (!is_boolean_name(peek())) fail(peek(), "'!' applies to boolean variables only");
          negate = true;
        }
        c = condition();
        const auto id = register_cond(c);
        NodeRef ind = negate ? build(c, id, store_->zero(), store_->one()) : build(c, id, store_->one(), store_->zero());
        guard = store_->apply(guard, ind, Op::mul);
      } while (accept(Tok::conj));
    }
    expect(Tok::colon, "':' before the partition value");
    Polynomial p = expr();
    expect(Tok::end);
    return {guard, store_->terminal(p)};
  }

  // ------------------------------------------------------------ domain
  Dcmdp domain() {
    Dcmdp m;
    m.store = std::make_shared<Store>();
    store_ = m.store.get();
    vars_ = &m.store->vars();
    const Token head = peek();
    expect_word("domain");
    m.name = expect(Tok::ident, "domain name").text;

    while (at_word("cvar") || at_word("bvar")) {
      const bool continuous = next().text == "cvar";
      const Token name = expect(Tok::ident, "variable name");
      if (is_reserved(name.text)) fail(name, "'" + name.text + "' is a reserved word");
      if (vars_->find(name.text)) fail(name, "duplicate variable '" + name.text + "'");
      if (continuous) {
        const Token open = expect(Tok::lbrack);
        Rational lo = signed_literal();
        expect(Tok::comma);
        Rational hi = signed_literal();
        const Token close = expect(Tok::rbrack);
        if (lo > hi)
          fail(SourceSpan{file_, open.span.line, open.span.column, close.span.end_column},
               "inverted bounds [" + to_string(lo) + ", " + to_string(hi) + "] for '" + name.text + "'");
        m.cvars.push_back(m.store->vars().declare_continuous(name.text, lo, hi));
      } else {
        m.bvars.push_back(m.store->vars().declare_boolean(name.text));
      }
    }

    std::vector<SourceSpan> action_spans;
    while (at_word("action")) {
      action_spans.push_back(peek().span);
      m.actions.push_back(action(m));
    }
    if (m.actions.empty()) fail(peek(), "expected 'action', found " + found(peek()));

    bool seen_discount = false;
    bool seen_horizon = false;
    while (at_word("discount") || at_word("horizon")) {
      const Token kw = next();
      if (kw.text == "discount") {
        if (seen_discount) fail(kw, "duplicate 'discount'");
        seen_discount = true;
        const Token start = peek();
        m.discount = signed_literal();
        if (m.discount < 0 || m.discount > 1) fail(start, "discount must lie in [0,1]");
      } else {
        if (seen_horizon) fail(kw, "duplicate 'horizon'");
        seen_horizon = true;
        if (at_word("inf")) {
          next();
          m.horizon.reset();
        } else {
          const Token n = expect(Tok::number, "horizon (integer or 'inf')");
          if (n.text.find('.') != std::string::npos || n.text.size() > 9) fail(n, "horizon must be an integer");
          m.horizon = static_cast<std::size_t>(std::stoul(n.text));
        }
      }
    }
    expect(Tok::end);

    for (const Violation& v : validate(m)) {
      SourceSpan where = head.span;
      for (std::size_t i = 0; i < m.actions.size(); ++i)
        if (v.where.rfind("action " + m.actions[i].name + ",", 0) == 0 || v.where == "action " + m.actions[i].name)
          where = action_spans[i];
      fail(where, v.to_string());
    }
    return m;
  }

  Action action(const Dcmdp& m) {
    expect_word("action");
    Action a;
    const Token name = expect(Tok::ident, "action name");
    if (is_reserved(name.text)) fail(name, "'" + name.text + "' is a reserved word");
    if (m.find_action(name.text)) fail(name, "duplicate action '" + name.text + "'");
    a.name = name.text;
    a.reward = store_->zero();
    bool seen_reward = false;
    expect(Tok::lbrace);
    while (!at(Tok::rbrace)) {
      const Token lhs = expect(Tok::ident, "statement");
      if (lhs.text == "reward") {
        if (seen_reward) fail(lhs, "duplicate reward");
        seen_reward = true;
        expect(Tok::assign);
        rules_ = Rules{false, false, false, false, "reward"};
        a.reward = case_expr();
        continue;
      }
      auto v = vars_->find(lhs.text);
      if (!v) fail(lhs, "unknown variable '" + lhs.text + "'");
      expect(Tok::prime, "''' after the updated variable");
      const Token op = next();
      if (op.kind == Tok::assign) {
        if (vars_->is_boolean(*v)) fail(op, "boolean '" + lhs.text + "' takes a probability ('~'), not '='");
        if (a.cses.count(*v) != 0) fail(lhs, "duplicate equation for '" + lhs.text + "''");
        rules_ = Rules{true, false, false, false, "CSE"};
        a.cses.emplace(*v, case_expr());
      } else if (op.kind == Tok::tilde) {
        if (!vars_->is_boolean(*v)) fail(op, "continuous '" + lhs.text + "' takes an equation ('='), not '~'");
        if (a.cpts.count(*v) != 0) fail(lhs, "duplicate probability for '" + lhs.text + "''");
        rules_ = Rules{false, false, false, true, "CPT"};
        a.cpts.emplace(*v, case_expr());
      } else {
        fail(op, "expected '=' or '~', found " + found(op));
      }
    }
    expect(Tok::rbrace);
    rules_ = Rules{};
    return a;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::string file_;
  Store* store_;
  const VarRegistry* vars_;
  Rules rules_;
  bool in_condition_ = false;
  int depth_ = 0;
};

template <class F>
auto with_span(const std::string& file, F&& body) {
  try {
    return body();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(SourceSpan{file, 1, 1, 1}, e.what());
  }
}

}  // namespace

Dcmdp parse_domain(std::string_view text, const std::string& file) {
  return with_span(file, [&] {
    Parser p(text, file, nullptr, nullptr);
    return p.domain();
  });
}

Dcmdp load_domain(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_domain(buf.str(), path);
}

NodeRef parse_case(Store& store, std::string_view text, const std::string& file) {
  return with_span(file, [&] {
    Parser p(text, file, &store, &store.vars());
    return p.whole_case();
  });
}

Polynomial parse_polynomial(const VarRegistry& vars, std::string_view text) {
  return with_span("<polynomial>", [&] {
    Parser p(text, "<polynomial>", nullptr, &vars);
    return p.whole_polynomial();
  });
}

// ------------------------------------------------------------- printing

std::string case_expression(const Store& store, NodeRef f) {
  if (store.is_terminal(f)) return "(" + store.terminal_poly(f).to_string(store.vars()) + ")";
  return "([" + store.decision(store.decision_of(f)).to_string(store.vars()) + "] " +
         case_expression(store, store.high(f)) + " " + case_expression(store, store.low(f)) + ")";
}

namespace {

std::string render_domain(const Dcmdp& m) {
  const VarRegistry& vars = m.vars();
  std::ostringstream out;
  out << "domain " << m.name << "\n\n";
  for (VarId x : m.cvars) {
    const VarInfo& i = vars.info(x);
    out << "cvar " << i.name << " [" << to_string(i.lower) << ", " << to_string(i.upper) << "]\n";
  }
  for (VarId b : m.bvars) out << "bvar " << vars.info(b).name << "\n";
  for (const Action& a : m.actions) {
    out << "\naction " << a.name << " {\n";
    for (VarId x : m.cvars)
      if (auto it = a.cses.find(x); it != a.cses.end())
        out << "  " << vars.info(x).name << "' = " << case_expression(*m.store, it->second) << "\n";
    for (VarId b : m.bvars)
      if (auto it = a.cpts.find(b); it != a.cpts.end())
        out << "  " << vars.info(b).name << "' ~ " << case_expression(*m.store, it->second) << "\n";
    out << "  reward = " << case_expression(*m.store, a.reward) << "\n";
    out << "}\n";
  }
  out << "\ndiscount " << to_string(m.discount) << "\n";
  out << "horizon " << (m.horizon ? std::to_string(*m.horizon) : std::string("inf")) << "\n";
  return out.str();
}

}  // namespace

// A reparse orders decisions by first appearance, which can reshape the
// trees; settle on text that reproduces itself.
std::string serialize_domain(const Dcmdp& m) {
  std::string text = render_domain(m);
  for (int pass = 0; pass < 16; ++pass) {
    std::string again = render_domain(parse_domain(text, "<serialized>"));
    if (again == text) break;
    text = std::move(again);
  }
  return text;
}

std::string to_case(const Store& store, NodeRef f) {
  std::ostringstream out;
  std::vector<std::string> atoms;
  auto walk = [&](auto&& self, NodeRef n) -> void {
    if (store.is_terminal(n)) {
      if (atoms.empty()) {
        out << "true";
      } else {
        for (std::size_t i = 0; i < atoms.size(); ++i) out << (i ? " && " : "") << atoms[i];
      }
      out << " : " << store.terminal_poly(n).to_string(store.vars()) << "\n";
      return;
    }
    const Decision& d = store.decision(store.decision_of(n));
    atoms.push_back(d.to_string(store.vars()));
    self(self, store.high(n));
    atoms.back() = d.to_string(store.vars(), true);
    self(self, store.low(n));
    atoms.pop_back();
  };
  walk(walk, f);
  return out.str();
}

namespace {

constexpr int kCoverSamples = 10000;

// `cover` counts how many partitions hold at each state; it must be 1
// everywhere inside the bounds.
void check_cover(Store& store, NodeRef cover) {
  const SourceSpan whole{"<case>", 1, 1, 1};
  NodeRef c = prune(store, cover);
  if (c == store.one()) return;
  auto complain = [&](const Rational& count) {
    if (count == 0) throw ParseError(whole, "case partitions are not exhaustive");
    throw ParseError(whole, "case partitions overlap");
  };
  bool linear = true;
  for (std::uint32_t d : store.decisions_in(c)) linear = linear && store.decision(d).is_linear();
  if (linear) {
    // every remaining path is feasible (up to strictness); any count != 1 is real
    std::vector<NodeRef> stack{c};
    while (!stack.empty()) {
      NodeRef n = stack.back();
      stack.pop_back();
      if (store.is_terminal(n)) {
        const Polynomial& p = store.terminal_poly(n);
        if (!p.is_constant() || p.constant_term() != 1) complain(p.constant_term());
        continue;
      }
      stack.push_back(store.high(n));
      stack.push_back(store.low(n));
    }
    return;
  }
  const VarRegistry& vars = store.vars();
  std::mt19937_64 rng(0xca5e);
  for (int k = 0; k < kCoverSamples; ++k) {
    Assignment s;
    for (std::uint32_t i = 0; i < vars.size(); ++i) {
      const VarInfo& info = vars.info(VarId{i});
      if (info.kind == VarKind::boolean) {
        s.set_bool(VarId{i}, (rng() & 1U) != 0);
      } else {
        Rational t(mpz_class(static_cast<unsigned long>(rng() % 100001)), mpz_class(100000));
        t.canonicalize();
        s.set(VarId{i}, info.lower + (info.upper - info.lower) * t);
      }
    }
    const Rational n = store.evaluate(c, s);
    if (n != 1) complain(n);
  }
}

}  // namespace

NodeRef from_case(Store& store, std::string_view text) {
  return with_span("<case>", [&] {
    NodeRef value = store.zero();
    NodeRef cover = store.zero();
    bool any = false;
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
      std::size_t end = text.find('\n', begin);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(begin, end - begin);
      ++line_no;
      begin = end + 1;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string_view::npos || line[first] == '#') continue;
      // pad with newlines so spans report the line within the whole text
      std::string padded(line_no - 1, '\n');
      padded += line;
      Parser p(padded, "<case>", &store, &store.vars());
      auto [guard, leaf] = p.partition();
      cover = store.apply(cover, guard, Op::add);
      value = store.apply(value, store.apply(guard, leaf, Op::mul), Op::add);
      any = true;
    }
    if (!any) throw ParseError(SourceSpan{"<case>", 1, 1, 1}, "empty case statement");
    check_cover(store, cover);
    return value;
  });
}

}  // namespace xsdp
