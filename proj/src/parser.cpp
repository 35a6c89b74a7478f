#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "rpc/netlist.hpp"

namespace rpc {

Expr Expr::constant(double v, std::size_t pos) {
  Expr e;
  e.op = Op::Const;
  e.value = v;
  e.position = pos;
  return e;
}

Expr Expr::variable(std::string name, std::size_t pos) {
  Expr e;
  e.op = Op::Var;
  e.name = std::move(name);
  e.position = pos;
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs, std::size_t pos) {
  Expr e;
  e.op = op;
  e.position = pos;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  return e;
}

Expr Expr::product(std::vector<Expr> factors, std::size_t pos) {
  if (factors.size() < 2) throw DomainError("a product needs at least 2 factors");
  Expr e;
  e.op = Op::Mul;
  e.position = pos;
  e.children = std::move(factors);
  return e;
}

std::string to_string(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Const: {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, e.value);
      return std::string(buf, end);
    }
    case Expr::Op::Var:
      return e.name;
    default:
      break;
  }
  const char* sym = e.op == Expr::Op::Add   ? " + "
                    : e.op == Expr::Op::Sub ? " - "
                    : e.op == Expr::Op::Mul ? " * "
                                            : " / ";
  std::string out = "(";
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (i) out += sym;
    out += to_string(e.children[i]);
  }
  return out + ")";
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = expr();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("syntax error: " + what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = Expr::binary(Expr::Op::Add, std::move(lhs), term(), at);
      } else if (accept('-')) {
        lhs = Expr::binary(Expr::Op::Sub, std::move(lhs), term(), at);
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    bool in_product = false;  // lhs is a product built by this '*' run
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        Expr rhs = factor();
        if (in_product) {
          lhs.children.push_back(std::move(rhs));
        } else {
          const std::size_t start = lhs.position;
          std::vector<Expr> factors;
          factors.push_back(std::move(lhs));
          factors.push_back(std::move(rhs));
          lhs = Expr::product(std::move(factors), start);
          in_product = true;
        }
      } else if (accept('/')) {
        lhs = Expr::binary(Expr::Op::Div, std::move(lhs), factor(), at);
        in_product = false;
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return Expr::variable(std::string(text_.substr(start, pos_ - start)), start);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr literal() {
    const std::size_t start = pos_;
    bool digits = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      digits = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) {
      pos_ = start;
      fail("malformed number");
    }
    const std::string token(text_.substr(start, pos_ - start));
    const double v = std::stod(token);
    if (v < 0.0 || v > 1.0) {
      throw ParseError("literal " + token + " outside [0,1]", start);
    }
    return Expr::constant(v, start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect(const Expr& e, std::set<std::string>& out) {
  if (e.op == Expr::Op::Var) out.insert(e.name);
  for (const auto& c : e.children) collect(c, out);
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

std::vector<std::string> variables(const Expr& e) {
  std::set<std::string> names;
  collect(e, names);
  return {names.begin(), names.end()};
}

double exact_value(const Expr& e, const Bindings& bindings) {
  switch (e.op) {
    case Expr::Op::Const:
      return e.value;
    case Expr::Op::Var: {
      auto it = bindings.find(e.name);
      if (it == bindings.end()) throw ConfigError("unbound variable '" + e.name + "'");
      return it->second;
    }
    case Expr::Op::Add:
      return exact_value(e.children[0], bindings) + exact_value(e.children[1], bindings);
    case Expr::Op::Sub:
      return exact_value(e.children[0], bindings) - exact_value(e.children[1], bindings);
    case Expr::Op::Div:
      return exact_value(e.children[0], bindings) / exact_value(e.children[1], bindings);
    case Expr::Op::Mul: {
      double prod = 1.0;
      for (const auto& c : e.children) prod *= exact_value(c, bindings);
      return prod;
    }
  }
  return 0.0;
}

}  // namespace rpc
