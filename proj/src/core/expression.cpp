#include "vharm/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "vharm/errors.hpp"

namespace vharm {

enum class Op { constant, variable, add, sub, mul, div, neg, pow, log, exp, sqrt, sin, cos };

struct Expression::Node {
  Op op;
  double value = 0.0;
  int variable = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_const(double v) {
  return std::make_shared<Expression::Node>(Expression::Node{Op::constant, v, 0, nullptr, nullptr});
}

NodePtr make_var(int i) {
  return std::make_shared<Expression::Node>(Expression::Node{Op::variable, 0.0, i, nullptr, nullptr});
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  if (a->op == Op::constant && b->op == Op::constant) {
    switch (op) {
      case Op::add: return make_const(a->value + b->value);
      case Op::sub: return make_const(a->value - b->value);
      case Op::mul: return make_const(a->value * b->value);
      case Op::div:
        if (b->value != 0.0) return make_const(a->value / b->value);
        break;
      case Op::pow: return make_const(std::pow(a->value, b->value));
      default: break;
    }
  }
  switch (op) {
    case Op::add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::sub:
      if (is_const(b, 0.0)) return a;
      break;
    case Op::mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::div:
      if (is_const(a, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::pow:
      if (is_const(b, 1.0)) return a;
      if (is_const(b, 0.0)) return make_const(1.0);
      break;
    default: break;
  }
  return std::make_shared<Expression::Node>(Expression::Node{op, 0.0, 0, std::move(a), std::move(b)});
}

NodePtr make_unary(Op op, NodePtr a) {
  if (a->op == Op::constant) {
    double v = a->value;
    switch (op) {
      case Op::neg: return make_const(-v);
      case Op::exp: return make_const(std::exp(v));
      case Op::sin: return make_const(std::sin(v));
      case Op::cos: return make_const(std::cos(v));
      case Op::log:
        if (v > 0) return make_const(std::log(v));
        break;
      case Op::sqrt:
        if (v >= 0) return make_const(std::sqrt(v));
        break;
      default: break;
    }
  }
  if (op == Op::neg && a->op == Op::neg) return a->lhs;
  return std::make_shared<Expression::Node>(Expression::Node{op, 0.0, 0, std::move(a), nullptr});
}

NodePtr add(NodePtr a, NodePtr b) { return make_binary(Op::add, std::move(a), std::move(b)); }
NodePtr sub(NodePtr a, NodePtr b) { return make_binary(Op::sub, std::move(a), std::move(b)); }
NodePtr mul(NodePtr a, NodePtr b) { return make_binary(Op::mul, std::move(a), std::move(b)); }
NodePtr divide(NodePtr a, NodePtr b) { return make_binary(Op::div, std::move(a), std::move(b)); }

double eval(const Expression::Node& n, const Point& x) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return x(n.variable);
    case Op::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Op::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Op::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Op::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Op::neg: return -eval(*n.lhs, x);
    case Op::pow: {
      const double base = eval(*n.lhs, x);
      if (n.rhs->op == Op::constant && n.rhs->value == 2.0) return base * base;
      return std::pow(base, eval(*n.rhs, x));
    }
    case Op::log: return std::log(eval(*n.lhs, x));
    case Op::exp: return std::exp(eval(*n.lhs, x));
    case Op::sqrt: return std::sqrt(eval(*n.lhs, x));
    case Op::sin: return std::sin(eval(*n.lhs, x));
    case Op::cos: return std::cos(eval(*n.lhs, x));
  }
  return 0.0;
}

NodePtr differentiate(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::constant: return make_const(0.0);
    case Op::variable: return make_const(n->variable == var ? 1.0 : 0.0);
    case Op::add: return add(differentiate(n->lhs, var), differentiate(n->rhs, var));
    case Op::sub: return sub(differentiate(n->lhs, var), differentiate(n->rhs, var));
    case Op::mul:
      return add(mul(differentiate(n->lhs, var), n->rhs), mul(n->lhs, differentiate(n->rhs, var)));
    case Op::div: {
      auto num = sub(mul(differentiate(n->lhs, var), n->rhs), mul(n->lhs, differentiate(n->rhs, var)));
      return divide(num, mul(n->rhs, n->rhs));
    }
    case Op::neg: return make_unary(Op::neg, differentiate(n->lhs, var));
    case Op::pow: {
      auto da = differentiate(n->lhs, var);
      if (n->rhs->op == Op::constant) {
        const double c = n->rhs->value;
        return mul(mul(make_const(c), make_binary(Op::pow, n->lhs, make_const(c - 1.0))), da);
      }
      auto db = differentiate(n->rhs, var);
      auto inner = add(mul(db, make_unary(Op::log, n->lhs)), divide(mul(n->rhs, da), n->lhs));
      return mul(n, inner);
    }
    case Op::log: return divide(differentiate(n->lhs, var), n->lhs);
    case Op::exp: return mul(n, differentiate(n->lhs, var));
    case Op::sqrt: return divide(differentiate(n->lhs, var), mul(make_const(2.0), n));
    case Op::sin: return mul(make_unary(Op::cos, n->lhs), differentiate(n->lhs, var));
    case Op::cos:
      return make_unary(Op::neg, mul(make_unary(Op::sin, n->lhs), differentiate(n->lhs, var)));
  }
  return make_const(0.0);
}

void print(const Expression::Node& n, std::ostream& out) {
  auto fn = [&](const char* name) {
    out << name << '(';
    print(*n.lhs, out);
    out << ')';
  };
  auto bin = [&](const char* sym) {
    out << '(';
    print(*n.lhs, out);
    out << sym;
    print(*n.rhs, out);
    out << ')';
  };
  switch (n.op) {
    case Op::constant: {
      std::ostringstream s;
      s.precision(17);
      s << n.value;
      out << s.str();
      break;
    }
    case Op::variable: out << 'x' << (n.variable + 1); break;
    case Op::add: bin("+"); break;
    case Op::sub: bin("-"); break;
    case Op::mul: bin("*"); break;
    case Op::div: bin("/"); break;
    case Op::pow: bin("^"); break;
    case Op::neg: out << "(-"; print(*n.lhs, out); out << ')'; break;
    case Op::log: fn("log"); break;
    case Op::exp: fn("exp"); break;
    case Op::sqrt: fn("sqrt"); break;
    case Op::sin: fn("sin"); break;
    case Op::cos: fn("cos"); break;
  }
}

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr n = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("expression '" + std::string(text_) + "' at offset " + std::to_string(pos_) +
                     ": " + what);
  }

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

  NodePtr expression() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = add(n, term());
      else if (accept('-')) n = sub(n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = mul(n, unary());
      else if (accept('/')) n = divide(n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_unary(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_binary(Op::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr n = expression();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(text_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string word(text_.substr(start, pos_ - start));
      if (word == "r2") {
        NodePtr sum = make_const(0.0);
        for (int i = 0; i < dim_; ++i) sum = add(sum, mul(make_var(i), make_var(i)));
        return sum;
      }
      if (word == "pi") return make_const(M_PI);
      if (word.size() > 1 && word[0] == 'x') {
        const int idx = std::atoi(word.c_str() + 1);
        if (idx < 1 || idx > dim_) fail("coordinate '" + word + "' out of range");
        return make_var(idx - 1);
      }
      Op op;
      if (word == "log") op = Op::log;
      else if (word == "exp") op = Op::exp;
      else if (word == "sqrt") op = Op::sqrt;
      else if (word == "sin") op = Op::sin;
      else if (word == "cos") op = Op::cos;
      else fail("unknown identifier '" + word + "'");
      if (!accept('(')) fail("expected '(' after " + word);
      NodePtr arg = expression();
      if (!accept(')')) fail("expected ')'");
      return make_unary(op, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, int dim, std::string source)
    : root_(std::move(root)), dim_(dim), source_(std::move(source)) {}

Expression Expression::parse(std::string_view text, int dim) {
  if (dim < 1 || dim > kMaxDim) throw InputError("expression dimension out of range");
  return Expression(Parser(text, dim).parse(), dim, std::string(text));
}

Expression Expression::constant(double value, int dim) {
  std::ostringstream s;
  s.precision(17);
  s << value;
  return Expression(make_const(value), dim, s.str());
}

double Expression::evaluate(const Point& x) const {
  if (x.size() != dim_) throw InputError("expression evaluated at point of wrong dimension");
  return eval(*root_, x);
}

Expression Expression::derivative(int variable) const {
  if (variable < 0 || variable >= dim_) throw InputError("derivative variable out of range");
  return Expression(differentiate(root_, variable), dim_, "");
}

std::string Expression::to_string() const {
  std::ostringstream s;
  print(*root_, s);
  return s.str();
}

}  // namespace vharm
