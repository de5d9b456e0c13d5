/*
 * Copyright 2026 The shapkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "shapkit/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <vector>

#include "shapkit/errors.hpp"

namespace shapkit {

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class constant_node final : public expr_node {
 public:
  explicit constant_node(double value) : value_(value) {}

  double eval(const feature_vector&) const override { return value_; }

  expr_ptr derivative(const std::string&) const override { return expr_constant(0.0); }

  expr_ptr substitute(const std::string&, const expr_ptr&) const override {
    return expr_constant(value_);
  }

  void collect_variables(std::set<std::string>&) const override {}

  std::string text() const override {
    if (value_ < 0.0) return "(" + format_number(value_) + ")";
    return format_number(value_);
  }

  double value() const { return value_; }

 private:
  double value_;
};

std::optional<double> as_constant(const expr_ptr& e) {
  if (auto c = std::dynamic_pointer_cast<const constant_node>(e)) return c->value();
  return std::nullopt;
}

class variable_node final : public expr_node {
 public:
  explicit variable_node(std::string name) : name_(std::move(name)) {}

  double eval(const feature_vector& x) const override { return x.get(name_); }

  expr_ptr derivative(const std::string& feature) const override {
    return expr_constant(feature == name_ ? 1.0 : 0.0);
  }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    if (feature == name_) return replacement;
    return expr_variable(name_);
  }

  void collect_variables(std::set<std::string>& out) const override { out.insert(name_); }

  std::string text() const override { return name_; }

 private:
  std::string name_;
};

enum class binary_kind { add, sub, mul, div };

class binary_node final : public expr_node {
 public:
  binary_node(binary_kind kind, expr_ptr a, expr_ptr b)
      : kind_(kind), a_(std::move(a)), b_(std::move(b)) {}

  double eval(const feature_vector& x) const override {
    const double a = a_->eval(x);
    const double b = b_->eval(x);
    switch (kind_) {
      case binary_kind::add:
        return a + b;
      case binary_kind::sub:
        return a - b;
      case binary_kind::mul:
        return a * b;
      case binary_kind::div:
        if (b == 0.0) throw domain_error("division by zero in expression");
        return a / b;
    }
    throw domain_error("unreachable binary kind");
  }

  expr_ptr derivative(const std::string& feature) const override {
    const expr_ptr da = a_->derivative(feature);
    const expr_ptr db = b_->derivative(feature);
    switch (kind_) {
      case binary_kind::add:
        return expr_add(da, db);
      case binary_kind::sub:
        return expr_sub(da, db);
      case binary_kind::mul:
        return expr_add(expr_mul(da, b_), expr_mul(a_, db));
      case binary_kind::div:
        return expr_div(expr_sub(expr_mul(da, b_), expr_mul(a_, db)), expr_mul(b_, b_));
    }
    throw domain_error("unreachable binary kind");
  }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    const expr_ptr a = a_->substitute(feature, replacement);
    const expr_ptr b = b_->substitute(feature, replacement);
    switch (kind_) {
      case binary_kind::add:
        return expr_add(a, b);
      case binary_kind::sub:
        return expr_sub(a, b);
      case binary_kind::mul:
        return expr_mul(a, b);
      case binary_kind::div:
        return expr_div(a, b);
    }
    throw domain_error("unreachable binary kind");
  }

  void collect_variables(std::set<std::string>& out) const override {
    a_->collect_variables(out);
    b_->collect_variables(out);
  }

  std::string text() const override {
    const char* op = "?";
    switch (kind_) {
      case binary_kind::add:
        op = " + ";
        break;
      case binary_kind::sub:
        op = " - ";
        break;
      case binary_kind::mul:
        op = " * ";
        break;
      case binary_kind::div:
        op = " / ";
        break;
    }
    return "(" + a_->text() + op + b_->text() + ")";
  }

 private:
  binary_kind kind_;
  expr_ptr a_;
  expr_ptr b_;
};

class minmax_node final : public expr_node {
 public:
  minmax_node(bool is_min, expr_ptr a, expr_ptr b)
      : is_min_(is_min), a_(std::move(a)), b_(std::move(b)) {}

  double eval(const feature_vector& x) const override {
    const double a = a_->eval(x);
    const double b = b_->eval(x);
    return is_min_ ? std::min(a, b) : std::max(a, b);
  }

  expr_ptr derivative(const std::string& feature) const override {
    // Piecewise: on ties the a-branch is chosen, consistent with eval for
    // min (std::min returns a on ties) and a.e. correct for max.
    const expr_ptr da = a_->derivative(feature);
    const expr_ptr db = b_->derivative(feature);
    const expr_ptr pick_a =
        is_min_ ? expr_compare("<=", a_, b_) : expr_compare(">=", a_, b_);
    return expr_add(expr_mul(pick_a, da),
                    expr_mul(expr_sub(expr_constant(1.0), pick_a), db));
  }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    const expr_ptr a = a_->substitute(feature, replacement);
    const expr_ptr b = b_->substitute(feature, replacement);
    return is_min_ ? expr_min(a, b) : expr_max(a, b);
  }

  void collect_variables(std::set<std::string>& out) const override {
    a_->collect_variables(out);
    b_->collect_variables(out);
  }

  std::string text() const override {
    return std::string(is_min_ ? "min" : "max") + "(" + a_->text() + ", " + b_->text() + ")";
  }

 private:
  bool is_min_;
  expr_ptr a_;
  expr_ptr b_;
};

class sqrt_node final : public expr_node {
 public:
  explicit sqrt_node(expr_ptr a) : a_(std::move(a)) {}

  double eval(const feature_vector& x) const override {
    const double a = a_->eval(x);
    if (a < 0.0) throw domain_error("sqrt of negative value in expression");
    return std::sqrt(a);
  }

  expr_ptr derivative(const std::string& feature) const override {
    const expr_ptr da = a_->derivative(feature);
    return expr_div(da, expr_mul(expr_constant(2.0), expr_sqrt(a_)));
  }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    return expr_sqrt(a_->substitute(feature, replacement));
  }

  void collect_variables(std::set<std::string>& out) const override {
    a_->collect_variables(out);
  }

  std::string text() const override { return "sqrt(" + a_->text() + ")"; }

 private:
  expr_ptr a_;
};

class ipow_node final : public expr_node {
 public:
  ipow_node(expr_ptr base, std::int64_t exponent)
      : base_(std::move(base)), exponent_(exponent) {}

  double eval(const feature_vector& x) const override {
    const double b = base_->eval(x);
    if (exponent_ < 0 && b == 0.0) throw domain_error("zero raised to negative power");
    double r = 1.0;
    std::int64_t e = exponent_ < 0 ? -exponent_ : exponent_;
    double acc = b;
    while (e > 0) {
      if (e & 1) r *= acc;
      acc *= acc;
      e >>= 1;
    }
    return exponent_ < 0 ? 1.0 / r : r;
  }

  expr_ptr derivative(const std::string& feature) const override {
    if (exponent_ == 0) return expr_constant(0.0);
    const expr_ptr da = base_->derivative(feature);
    return expr_mul(expr_mul(expr_constant(static_cast<double>(exponent_)),
                             expr_ipow(base_, exponent_ - 1)),
                    da);
  }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    return expr_ipow(base_->substitute(feature, replacement), exponent_);
  }

  void collect_variables(std::set<std::string>& out) const override {
    base_->collect_variables(out);
  }

  std::string text() const override {
    return "(" + base_->text() + " ^ " + std::to_string(exponent_) + ")";
  }

 private:
  expr_ptr base_;
  std::int64_t exponent_;
};

class neg_node final : public expr_node {
 public:
  explicit neg_node(expr_ptr a) : a_(std::move(a)) {}

  double eval(const feature_vector& x) const override { return -a_->eval(x); }

  expr_ptr derivative(const std::string& feature) const override {
    return expr_neg(a_->derivative(feature));
  }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    return expr_neg(a_->substitute(feature, replacement));
  }

  void collect_variables(std::set<std::string>& out) const override {
    a_->collect_variables(out);
  }

  std::string text() const override { return "(-" + a_->text() + ")"; }

 private:
  expr_ptr a_;
};

enum class compare_kind { eq, ne, lt, le, gt, ge };

class compare_node final : public expr_node {
 public:
  compare_node(compare_kind kind, expr_ptr a, expr_ptr b)
      : kind_(kind), a_(std::move(a)), b_(std::move(b)) {}

  double eval(const feature_vector& x) const override {
    const double a = a_->eval(x);
    const double b = b_->eval(x);
    bool r = false;
    switch (kind_) {
      case compare_kind::eq:
        r = a == b;
        break;
      case compare_kind::ne:
        r = a != b;
        break;
      case compare_kind::lt:
        r = a < b;
        break;
      case compare_kind::le:
        r = a <= b;
        break;
      case compare_kind::gt:
        r = a > b;
        break;
      case compare_kind::ge:
        r = a >= b;
        break;
    }
    return r ? 1.0 : 0.0;
  }

  expr_ptr derivative(const std::string&) const override {
    // Zero almost everywhere; the switching surface has measure zero.
    return expr_constant(0.0);
  }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    return expr_compare(op_text(), a_->substitute(feature, replacement),
                        b_->substitute(feature, replacement));
  }

  void collect_variables(std::set<std::string>& out) const override {
    a_->collect_variables(out);
    b_->collect_variables(out);
  }

  std::string text() const override {
    return "(" + a_->text() + " " + op_text() + " " + b_->text() + ")";
  }

 private:
  std::string op_text() const {
    switch (kind_) {
      case compare_kind::eq:
        return "==";
      case compare_kind::ne:
        return "!=";
      case compare_kind::lt:
        return "<";
      case compare_kind::le:
        return "<=";
      case compare_kind::gt:
        return ">";
      case compare_kind::ge:
        return ">=";
    }
    return "?";
  }

  compare_kind kind_;
  expr_ptr a_;
  expr_ptr b_;
};

class logical_node final : public expr_node {
 public:
  logical_node(bool is_and, expr_ptr a, expr_ptr b)
      : is_and_(is_and), a_(std::move(a)), b_(std::move(b)) {}

  double eval(const feature_vector& x) const override {
    const bool a = a_->eval(x) != 0.0;
    const bool b = b_->eval(x) != 0.0;
    return (is_and_ ? (a && b) : (a || b)) ? 1.0 : 0.0;
  }

  expr_ptr derivative(const std::string&) const override { return expr_constant(0.0); }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    const expr_ptr a = a_->substitute(feature, replacement);
    const expr_ptr b = b_->substitute(feature, replacement);
    return is_and_ ? expr_and(a, b) : expr_or(a, b);
  }

  void collect_variables(std::set<std::string>& out) const override {
    a_->collect_variables(out);
    b_->collect_variables(out);
  }

  std::string text() const override {
    return "(" + a_->text() + (is_and_ ? " && " : " || ") + b_->text() + ")";
  }

 private:
  bool is_and_;
  expr_ptr a_;
  expr_ptr b_;
};

class not_node final : public expr_node {
 public:
  explicit not_node(expr_ptr a) : a_(std::move(a)) {}

  double eval(const feature_vector& x) const override {
    return a_->eval(x) != 0.0 ? 0.0 : 1.0;
  }

  expr_ptr derivative(const std::string&) const override { return expr_constant(0.0); }

  expr_ptr substitute(const std::string& feature, const expr_ptr& replacement) const override {
    return expr_not(a_->substitute(feature, replacement));
  }

  void collect_variables(std::set<std::string>& out) const override {
    a_->collect_variables(out);
  }

  std::string text() const override { return "(!" + a_->text() + ")"; }

 private:
  expr_ptr a_;
};

}  // namespace

expr_ptr expr_constant(double value) { return std::make_shared<constant_node>(value); }

expr_ptr expr_variable(const std::string& name) {
  return std::make_shared<variable_node>(name);
}

expr_ptr expr_add(const expr_ptr& a, const expr_ptr& b) {
  const auto ca = as_constant(a);
  const auto cb = as_constant(b);
  if (ca && cb) return expr_constant(*ca + *cb);
  if (ca && *ca == 0.0) return b;
  if (cb && *cb == 0.0) return a;
  return std::make_shared<binary_node>(binary_kind::add, a, b);
}

expr_ptr expr_sub(const expr_ptr& a, const expr_ptr& b) {
  const auto ca = as_constant(a);
  const auto cb = as_constant(b);
  if (ca && cb) return expr_constant(*ca - *cb);
  if (cb && *cb == 0.0) return a;
  if (ca && *ca == 0.0) return expr_neg(b);
  return std::make_shared<binary_node>(binary_kind::sub, a, b);
}

expr_ptr expr_mul(const expr_ptr& a, const expr_ptr& b) {
  const auto ca = as_constant(a);
  const auto cb = as_constant(b);
  if (ca && cb) return expr_constant(*ca * *cb);
  if (ca && *ca == 0.0) return expr_constant(0.0);
  if (cb && *cb == 0.0) return expr_constant(0.0);
  if (ca && *ca == 1.0) return b;
  if (cb && *cb == 1.0) return a;
  return std::make_shared<binary_node>(binary_kind::mul, a, b);
}

expr_ptr expr_div(const expr_ptr& a, const expr_ptr& b) {
  const auto ca = as_constant(a);
  const auto cb = as_constant(b);
  if (cb && *cb == 0.0) throw domain_error("division by constant zero in expression");
  if (ca && cb) return expr_constant(*ca / *cb);
  if (cb && *cb == 1.0) return a;
  if (ca && *ca == 0.0) return expr_constant(0.0);
  return std::make_shared<binary_node>(binary_kind::div, a, b);
}

expr_ptr expr_neg(const expr_ptr& a) {
  if (const auto ca = as_constant(a)) return expr_constant(-*ca);
  return std::make_shared<neg_node>(a);
}

expr_ptr expr_min(const expr_ptr& a, const expr_ptr& b) {
  return std::make_shared<minmax_node>(true, a, b);
}

expr_ptr expr_max(const expr_ptr& a, const expr_ptr& b) {
  return std::make_shared<minmax_node>(false, a, b);
}

expr_ptr expr_sqrt(const expr_ptr& a) { return std::make_shared<sqrt_node>(a); }

expr_ptr expr_ipow(const expr_ptr& base, std::int64_t exponent) {
  if (exponent == 0) return expr_constant(1.0);
  if (exponent == 1) return base;
  return std::make_shared<ipow_node>(base, exponent);
}

expr_ptr expr_compare(const std::string& op, const expr_ptr& a, const expr_ptr& b) {
  compare_kind kind;
  if (op == "==") {
    kind = compare_kind::eq;
  } else if (op == "!=") {
    kind = compare_kind::ne;
  } else if (op == "<") {
    kind = compare_kind::lt;
  } else if (op == "<=") {
    kind = compare_kind::le;
  } else if (op == ">") {
    kind = compare_kind::gt;
  } else if (op == ">=") {
    kind = compare_kind::ge;
  } else {
    throw argument_error("unknown comparison operator: " + op);
  }
  return std::make_shared<compare_node>(kind, a, b);
}

expr_ptr expr_and(const expr_ptr& a, const expr_ptr& b) {
  return std::make_shared<logical_node>(true, a, b);
}

expr_ptr expr_or(const expr_ptr& a, const expr_ptr& b) {
  return std::make_shared<logical_node>(false, a, b);
}

expr_ptr expr_not(const expr_ptr& a) { return std::make_shared<not_node>(a); }

namespace {

struct token {
  enum class kind { number, ident, op, end };
  kind k = kind::end;
  double number = 0.0;
  std::string text;
  std::size_t pos = 0;
};

class lexer {
 public:
  explicit lexer(const std::string& src) : src_(src) { advance(); }

  const token& peek() const { return current_; }

  token take() {
    token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    current_ = token{};
    current_.pos = pos_;
    if (pos_ >= src_.size()) {
      current_.k = token::kind::end;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin) {
        throw parse_error("bad numeric literal at position " + std::to_string(pos_));
      }
      current_.k = token::kind::number;
      current_.number = value;
      pos_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = pos_;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) {
        ++j;
      }
      current_.k = token::kind::ident;
      current_.text = src_.substr(pos_, j - pos_);
      pos_ = j;
      return;
    }
    static const char* two_char_ops[] = {"==", "!=", "<=", ">=", "&&", "||"};
    for (const char* op : two_char_ops) {
      if (src_.compare(pos_, 2, op) == 0) {
        current_.k = token::kind::op;
        current_.text = op;
        pos_ += 2;
        return;
      }
    }
    static const std::string one_char_ops = "+-*/^()<>!,";
    if (one_char_ops.find(c) != std::string::npos) {
      current_.k = token::kind::op;
      current_.text = std::string(1, c);
      ++pos_;
      return;
    }
    throw parse_error(std::string("unexpected character '") + c + "' at position " +
                      std::to_string(pos_));
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  token current_;
};

class parser {
 public:
  explicit parser(const std::string& src) : lex_(src) {}

  expr_ptr parse() {
    expr_ptr e = parse_or();
    if (lex_.peek().k != token::kind::end) {
      throw parse_error("unexpected trailing input at position " +
                        std::to_string(lex_.peek().pos));
    }
    return e;
  }

 private:
  bool accept_op(const std::string& op) {
    if (lex_.peek().k == token::kind::op && lex_.peek().text == op) {
      lex_.take();
      return true;
    }
    return false;
  }

  void expect_op(const std::string& op) {
    if (!accept_op(op)) {
      throw parse_error("expected '" + op + "' at position " + std::to_string(lex_.peek().pos));
    }
  }

  expr_ptr parse_or() {
    expr_ptr e = parse_and();
    while (accept_op("||")) e = expr_or(e, parse_and());
    return e;
  }

  expr_ptr parse_and() {
    expr_ptr e = parse_comparison();
    while (accept_op("&&")) e = expr_and(e, parse_comparison());
    return e;
  }

  expr_ptr parse_comparison() {
    expr_ptr e = parse_additive();
    static const char* cmp_ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (const char* op : cmp_ops) {
      if (lex_.peek().k == token::kind::op && lex_.peek().text == op) {
        lex_.take();
        return expr_compare(op, e, parse_additive());
      }
    }
    return e;
  }

  expr_ptr parse_additive() {
    expr_ptr e = parse_multiplicative();
    for (;;) {
      if (accept_op("+")) {
        e = expr_add(e, parse_multiplicative());
      } else if (accept_op("-")) {
        e = expr_sub(e, parse_multiplicative());
      } else {
        return e;
      }
    }
  }

  expr_ptr parse_multiplicative() {
    expr_ptr e = parse_unary();
    for (;;) {
      if (accept_op("*")) {
        e = expr_mul(e, parse_unary());
      } else if (accept_op("/")) {
        e = expr_div(e, parse_unary());
      } else {
        return e;
      }
    }
  }

  expr_ptr parse_unary() {
    if (accept_op("-")) return expr_neg(parse_unary());
    if (accept_op("!")) return expr_not(parse_unary());
    return parse_power();
  }

  expr_ptr parse_power() {
    expr_ptr base = parse_atom();
    if (!accept_op("^")) return base;
    bool negative = accept_op("-");
    const token t = lex_.take();
    if (t.k != token::kind::number) {
      throw parse_error("expected integer exponent at position " + std::to_string(t.pos));
    }
    const double rounded = std::round(t.number);
    if (rounded != t.number) {
      throw parse_error("exponent must be an integer at position " + std::to_string(t.pos));
    }
    auto exponent = static_cast<std::int64_t>(rounded);
    if (negative) exponent = -exponent;
    return expr_ipow(base, exponent);
  }

  expr_ptr parse_atom() {
    const token t = lex_.take();
    if (t.k == token::kind::number) return expr_constant(t.number);
    if (t.k == token::kind::op && t.text == "(") {
      expr_ptr e = parse_or();
      expect_op(")");
      return e;
    }
    if (t.k == token::kind::ident) {
      if (lex_.peek().k == token::kind::op && lex_.peek().text == "(") {
        return parse_call(t);
      }
      return expr_variable(t.text);
    }
    throw parse_error("unexpected token at position " + std::to_string(t.pos));
  }

  expr_ptr parse_call(const token& name) {
    expect_op("(");
    std::vector<expr_ptr> args;
    if (!(lex_.peek().k == token::kind::op && lex_.peek().text == ")")) {
      args.push_back(parse_or());
      while (accept_op(",")) args.push_back(parse_or());
    }
    expect_op(")");
    const auto require_arity = [&](std::size_t n) {
      if (args.size() != n) {
        throw parse_error("function '" + name.text + "' expects " + std::to_string(n) +
                          " argument(s) at position " + std::to_string(name.pos));
      }
    };
    if (name.text == "min") {
      require_arity(2);
      return expr_min(args[0], args[1]);
    }
    if (name.text == "max") {
      require_arity(2);
      return expr_max(args[0], args[1]);
    }
    if (name.text == "sqrt") {
      require_arity(1);
      return expr_sqrt(args[0]);
    }
    if (name.text == "pow") {
      require_arity(2);
      const auto c = as_constant(args[1]);
      if (!c || std::round(*c) != *c) {
        throw parse_error("pow exponent must be an integer literal at position " +
                          std::to_string(name.pos));
      }
      return expr_ipow(args[0], static_cast<std::int64_t>(*c));
    }
    throw parse_error("unknown function '" + name.text + "' at position " +
                      std::to_string(name.pos));
  }

  lexer lex_;
};

}  // namespace

expr_ptr parse_expression(const std::string& source) {
  parser p(source);
  return p.parse();
}

}  // namespace shapkit
