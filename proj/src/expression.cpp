#include "plateflow/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "plateflow/errors.hpp"

namespace plateflow {

struct Expression::Node {
  enum Kind { number, variable, add, sub, mul, div, pow, neg, call } kind;
  double value = 0.0;
  int var = 0;              // 0 t, 1 x1, 2 x2, 3 x3
  std::string fn{};
  std::size_t begin = 0, end = 0;  // source span
  std::vector<std::shared_ptr<const Node>> args{};

  double eval(const double* v) const {
    switch (kind) {
      case number: return value;
      case variable: return v[var];
      case add: return args[0]->eval(v) + args[1]->eval(v);
      case sub: return args[0]->eval(v) - args[1]->eval(v);
      case mul: return args[0]->eval(v) * args[1]->eval(v);
      case div: return args[0]->eval(v) / args[1]->eval(v);
      case pow: return std::pow(args[0]->eval(v), args[1]->eval(v));
      case neg: return -args[0]->eval(v);
      case call: {
        const double a = args[0]->eval(v);
        if (fn == "sin") return std::sin(a);
        if (fn == "cos") return std::cos(a);
        return std::exp(a);
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    skip();
    if (pos_ == s_.size()) fail("empty expression");
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::parse, "column " + std::to_string(pos_ + 1) + ": " + what + " in \"" + s_ + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  NodePtr binary(Expression::Node::Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>(Expression::Node{k});
    n->begin = a->begin;
    n->end = b->end;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = binary(Expression::Node::add, n, term());
      else if (accept('-')) n = binary(Expression::Node::sub, n, term());
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = binary(Expression::Node::mul, n, unary());
      else if (accept('/')) n = binary(Expression::Node::div, n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    skip();
    const std::size_t at = pos_;
    if (accept('-')) {
      auto n = std::make_shared<Expression::Node>(Expression::Node{Expression::Node::neg});
      n->args = {unary()};
      n->begin = at;
      n->end = n->args[0]->end;
      return n;
    }
    if (accept('+')) return unary();
    NodePtr base = atom();
    if (accept('^')) return binary(Expression::Node::pow, base, unary());
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ == s_.size()) fail("unexpected end of expression");
    const std::size_t at = pos_;
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      auto n = std::make_shared<Expression::Node>(*inner);
      n->begin = at;
      n->end = pos_;
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = s_.c_str() + pos_;
      char* stop = nullptr;
      const double v = std::strtod(start, &stop);
      if (stop == start) fail("malformed number");
      pos_ += static_cast<std::size_t>(stop - start);
      auto n = std::make_shared<Expression::Node>(Expression::Node{Expression::Node::number});
      n->value = v;
      n->begin = at;
      n->end = pos_;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(at, pos_ - at);
      auto n = std::make_shared<Expression::Node>(Expression::Node{Expression::Node::variable});
      n->begin = at;
      if (name == "sin" || name == "cos" || name == "exp") {
        if (!accept('(')) fail("expected '(' after " + name);
        n->kind = Expression::Node::call;
        n->fn = name;
        n->args = {expr()};
        if (!accept(')')) fail("expected ')'");
      } else if (name == "pi") {
        n->kind = Expression::Node::number;
        n->value = std::numbers::pi;
      } else if (name == "t") {
        n->var = 0;
      } else if (name == "x1" || name == "x2" || name == "x3") {
        n->var = name[1] - '0';
      } else {
        pos_ = at;
        fail("unknown name '" + name + "'");
      }
      n->end = pos_;
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

bool mentions(const Expression::Node& n, int var) {
  if (n.kind == Expression::Node::variable) return n.var == var;
  for (const auto& a : n.args)
    if (mentions(*a, var)) return true;
  return false;
}

bool periodic(const Expression::Node& n, double period_t, double period_x) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double shift[3] = {period_t, period_x, period_x};
  for (int trial = 0; trial < 8; ++trial) {
    const double v[4] = {period_t * u(rng), period_x * u(rng), period_x * u(rng), u(rng)};
    const double base = n.eval(v);
    for (int d = 0; d < 3; ++d) {
      double w[4] = {v[0], v[1], v[2], v[3]};
      w[d] += shift[d];
      const double moved = n.eval(w);
      if (!std::isfinite(base) || !std::isfinite(moved)) return false;
      if (std::abs(moved - base) > 1e-9 * (1.0 + std::abs(base))) return false;
    }
  }
  return true;
}

const Expression::Node* innermost_bad_call(const Expression::Node& n, double period_t, double period_x) {
  for (const auto& a : n.args)
    if (const Expression::Node* hit = innermost_bad_call(*a, period_t, period_x)) return hit;
  if (n.kind == Expression::Node::call && !periodic(n, period_t, period_x)) return &n;
  return nullptr;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(e.text_).run();
  return e;
}

double Expression::operator()(double t, double x1, double x2, double x3) const {
  const double v[4] = {t, x1, x2, x3};
  return root_->eval(v);
}

bool Expression::is_zero() const { return root_->kind == Node::number && root_->value == 0.0; }

bool Expression::uses_x3() const { return mentions(*root_, 3); }

bool Expression::is_constant() const {
  for (int v = 0; v < 4; ++v)
    if (mentions(*root_, v)) return false;
  return true;
}

void Expression::check_periodic(double period_t, double period_x) const {
  if (periodic(*root_, period_t, period_x)) return;
  const Node* bad = innermost_bad_call(*root_, period_t, period_x);
  if (!bad) bad = root_.get();
  throw Error(ErrorKind::periodicity, "term \"" + text_.substr(bad->begin, bad->end - bad->begin) + "\" at column " +
                                          std::to_string(bad->begin + 1) + " is not periodic on the lattice");
}

double evaluate_constant(const std::string& text) {
  const Expression e = Expression::parse(text);
  if (!e.is_constant()) throw Error(ErrorKind::parse, "\"" + text + "\" must be a constant");
  return e(0.0, 0.0, 0.0, 0.0);
}

SpectralField sample_expression(const TorusGrid& grid, const Expression& e) {
  e.check_periodic(grid.period_t(), grid.period_x());
  const Samples s = sample_function(grid, 1, [&](double t, double x1, double x2, double x3, cplx* out) {
    out[0] = e(t, x1, x2, x3);
  });
  return forward_transform(s, grid, true);
}

PlateField sample_plate_expression(const TorusGrid& grid, const Expression& e) {
  if (e.uses_x3()) throw Error(ErrorKind::parse, "plate data \"" + e.text() + "\" cannot depend on x3");
  e.check_periodic(grid.period_t(), grid.period_x());
  const Samples s = sample_plate_function(grid, [&](double t, double x1, double x2) { return cplx(e(t, x1, x2, 0.0)); });
  return forward_transform_plate(s, grid, true);
}

}  // namespace plateflow
