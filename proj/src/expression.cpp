#include "btq/expression.hpp"

#include "btq/toric_geometry.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace btq {

struct Expression::Node {
  explicit Node(Kind k) : kind(k) {}

  Kind kind;
  double value = 0.0;             // constant; or affine shift
  std::vector<double> coeffs;     // affine
  std::string label;              // affine, for printing
  Rational exponent{1};           // pow
  int order = 0;                  // cutoff derivative order
  std::shared_ptr<const Node> a;  // first operand / argument
  std::shared_ptr<const Node> b;  // second operand
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Kind;

NodePtr make(Expression::Node n) { return std::make_shared<const Expression::Node>(std::move(n)); }

NodePtr constant_node(double v) {
  Expression::Node n{Kind::kConstant};
  n.value = v;
  return make(std::move(n));
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::kConstant && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == Kind::kConstant; }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return constant_node(a->value + b->value);
  Expression::Node n{Kind::kAdd};
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

NodePtr neg(NodePtr a) {
  if (is_const(a)) return constant_node(-a->value);
  if (a->kind == Kind::kNeg) return a->a;
  Expression::Node n{Kind::kNeg};
  n.a = std::move(a);
  return make(std::move(n));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  if (is_const(a) && is_const(b)) return constant_node(a->value - b->value);
  Expression::Node n{Kind::kSub};
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant_node(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return constant_node(a->value * b->value);
  Expression::Node n{Kind::kMul};
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

NodePtr pow_node(NodePtr base, const Rational& e) {
  if (e == Rational(0)) return constant_node(1.0);
  if (e == Rational(1)) return base;
  Expression::Node n{Kind::kPow};
  n.exponent = e;
  n.a = std::move(base);
  return make(std::move(n));
}

NodePtr unary(Kind kind, NodePtr arg, int order = 0) {
  Expression::Node n{kind};
  n.a = std::move(arg);
  n.order = order;
  return make(std::move(n));
}

// d^j/du^j exp(-1/u) = P_j(1/u) exp(-1/u) with P_0 = 1 and
// P_{j+1}(s) = s^2 (P_j(s) - P_j'(s)).
double cutoff_value(double u, int order) {
  if (u <= 0.0) return 0.0;
  std::vector<double> p{1.0};
  for (int j = 0; j < order; ++j) {
    std::vector<double> next(p.size() + 2, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i + 2] += p[i];
      if (i > 0) next[i + 1] -= static_cast<double>(i) * p[i];
    }
    p = std::move(next);
  }
  const double s = 1.0 / u;
  double poly = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) poly = poly * s + p[i];
  return poly * std::exp(-s);
}

double eval_node(const Expression::Node& n, std::span<const double> x) {
  switch (n.kind) {
    case Kind::kConstant:
      return n.value;
    case Kind::kAffine: {
      double v = n.value;
      for (std::size_t i = 0; i < n.coeffs.size(); ++i) v += n.coeffs[i] * x[i];
      return v;
    }
    case Kind::kAdd:
      return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Kind::kSub:
      return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Kind::kMul:
      return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Kind::kNeg:
      return -eval_node(*n.a, x);
    case Kind::kPow: {
      const double base = eval_node(*n.a, x);
      const bool integral = n.exponent.denominator() == 1;
      if (!integral && base < 0.0) {
        throw DomainError("fractional power of a negative base");
      }
      if (n.exponent < 0 && base == 0.0) {
        throw DomainError("negative power of a vanishing base");
      }
      if (integral) {
        return std::pow(base, static_cast<double>(n.exponent.numerator()));
      }
      if (n.exponent.denominator() == 2) {
        const double root = std::sqrt(base);
        const long long whole = n.exponent.numerator();
        return std::pow(root, static_cast<double>(whole));
      }
      return std::pow(base, to_double(n.exponent));
    }
    case Kind::kSin:
      return std::sin(eval_node(*n.a, x));
    case Kind::kCos:
      return std::cos(eval_node(*n.a, x));
    case Kind::kExp:
      return std::exp(eval_node(*n.a, x));
    case Kind::kCutoff:
      return cutoff_value(eval_node(*n.a, x), n.order);
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, std::size_t var) {
  switch (n->kind) {
    case Kind::kConstant:
      return constant_node(0.0);
    case Kind::kAffine:
      return constant_node(var < n->coeffs.size() ? n->coeffs[var] : 0.0);
    case Kind::kAdd:
      return add(diff_node(n->a, var), diff_node(n->b, var));
    case Kind::kSub:
      return sub(diff_node(n->a, var), diff_node(n->b, var));
    case Kind::kMul:
      return add(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
    case Kind::kNeg:
      return neg(diff_node(n->a, var));
    case Kind::kPow: {
      const NodePtr inner = diff_node(n->a, var);
      if (is_const(inner, 0.0)) return constant_node(0.0);
      const NodePtr outer = mul(constant_node(to_double(n->exponent)),
                                pow_node(n->a, n->exponent - 1));
      return mul(outer, inner);
    }
    case Kind::kSin:
      return mul(unary(Kind::kCos, n->a), diff_node(n->a, var));
    case Kind::kCos:
      return neg(mul(unary(Kind::kSin, n->a), diff_node(n->a, var)));
    case Kind::kExp:
      return mul(n, diff_node(n->a, var));
    case Kind::kCutoff:
      return mul(unary(Kind::kCutoff, n->a, n->order + 1), diff_node(n->a, var));
  }
  return constant_node(0.0);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void print(const Expression::Node& n, std::ostream& os) {
  switch (n.kind) {
    case Kind::kConstant:
      os << format_double(n.value);
      return;
    case Kind::kAffine:
      if (!n.label.empty()) {
        os << n.label;
        return;
      }
      os << "(";
      for (std::size_t i = 0; i < n.coeffs.size(); ++i) {
        if (n.coeffs[i] != 0.0) os << format_double(n.coeffs[i]) << "*x" << (i + 1) << " + ";
      }
      os << format_double(n.value) << ")";
      return;
    case Kind::kAdd:
      os << "(";
      print(*n.a, os);
      os << " + ";
      print(*n.b, os);
      os << ")";
      return;
    case Kind::kSub:
      os << "(";
      print(*n.a, os);
      os << " - ";
      print(*n.b, os);
      os << ")";
      return;
    case Kind::kMul:
      print(*n.a, os);
      os << "*";
      print(*n.b, os);
      return;
    case Kind::kNeg:
      os << "(-";
      print(*n.a, os);
      os << ")";
      return;
    case Kind::kPow:
      os << "(";
      print(*n.a, os);
      os << ")^(" << format_rational(n.exponent) << ")";
      return;
    case Kind::kSin:
      os << "sin(";
      break;
    case Kind::kCos:
      os << "cos(";
      break;
    case Kind::kExp:
      os << "exp(";
      break;
    case Kind::kCutoff:
      os << "cutoff";
      if (n.order > 0) os << "'" << n.order;
      os << "(";
      break;
  }
  print(*n.a, os);
  os << ")";
}

std::size_t count(const Expression::Node& n) {
  std::size_t c = 1;
  if (n.a) c += count(*n.a);
  if (n.b) c += count(*n.b);
  return c;
}

}  // namespace

Expression::Expression() : node_(constant_node(0.0)) {}
Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::constant(double value) { return Expression(constant_node(value)); }

Expression Expression::affine(std::vector<double> coeffs, double shift, std::string label) {
  Node n{Kind::kAffine};
  n.coeffs = std::move(coeffs);
  n.value = shift;
  n.label = std::move(label);
  return Expression(make(std::move(n)));
}

Expression Expression::variable(std::size_t dim, std::size_t index) {
  std::vector<double> c(dim, 0.0);
  c.at(index) = 1.0;
  return affine(std::move(c), 0.0, "x" + std::to_string(index + 1));
}

Expression operator+(const Expression& a, const Expression& b) { return Expression(add(a.node_, b.node_)); }
Expression operator-(const Expression& a, const Expression& b) { return Expression(sub(a.node_, b.node_)); }
Expression operator*(const Expression& a, const Expression& b) { return Expression(mul(a.node_, b.node_)); }
Expression operator-(const Expression& a) { return Expression(neg(a.node_)); }

Expression Expression::pow(const Expression& base, const Rational& exponent) {
  return Expression(pow_node(base.node_, exponent));
}
Expression Expression::sin(const Expression& arg) { return Expression(unary(Kind::kSin, arg.node_)); }
Expression Expression::cos(const Expression& arg) { return Expression(unary(Kind::kCos, arg.node_)); }
Expression Expression::exp(const Expression& arg) { return Expression(unary(Kind::kExp, arg.node_)); }
Expression Expression::cutoff(const Expression& arg, int order) {
  return Expression(unary(Kind::kCutoff, arg.node_, order));
}

Expression::Kind Expression::kind() const { return node_->kind; }
bool Expression::is_zero() const { return is_const(node_, 0.0); }

double Expression::constant_value() const {
  if (node_->kind != Kind::kConstant) throw std::logic_error("not a constant expression");
  return node_->value;
}

double Expression::eval(std::span<const double> x) const { return eval_node(*node_, x); }

Expression Expression::diff(std::size_t var) const { return Expression(diff_node(node_, var)); }

Expression Expression::diff(std::span<const int> orders) const {
  NodePtr n = node_;
  for (std::size_t var = 0; var < orders.size(); ++var) {
    for (int j = 0; j < orders[var]; ++j) n = diff_node(n, var);
  }
  return Expression(std::move(n));
}

std::string Expression::to_string() const {
  std::ostringstream os;
  print(*node_, os);
  return os.str();
}

std::size_t Expression::node_count() const { return count(*node_); }

// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ToricPolytope& polytope) : text_(text), polytope_(polytope) {}

  Expression parse() {
    Expression e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression '" + std::string(text_) + "' at position " +
                                std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expression expr() {
    Expression e = term();
    while (true) {
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expression term() {
    Expression e = unary_expr();
    while (accept('*')) e = e * unary_expr();
    return e;
  }

  Expression unary_expr() {
    if (accept('-')) return -unary_expr();
    return power();
  }

  Expression power() {
    bool is_lform = false;
    Expression base = primary(is_lform);
    if (!accept('^')) return base;
    const Rational e = exponent();
    if (e.denominator() != 1 && !is_lform) {
      fail("non-integer exponents apply to l-forms (lFj) only");
    }
    return Expression::pow(base, e);
  }

  Rational exponent() {
    if (accept('(')) {
      const bool negative = accept('-');
      Rational r = rational();
      expect(')');
      return negative ? -r : r;
    }
    const bool negative = accept('-');
    Rational r = rational();
    return negative ? -r : r;
  }

  bool at_digit() {
    skip();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  std::string_view digits() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected digits");
    return text_.substr(start, pos_ - start);
  }

  Rational rational() {
    const std::string_view num = digits();
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("expected denominator digits");
      }
      const std::string_view den = digits();
      return parse_rational(std::string(num) + "/" + std::string(den));
    }
    return parse_rational(num);
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::size_t index(std::size_t limit, const std::string& what) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail(what + " needs a 1-based index");
    const long long v = parse_rational(text_.substr(start, pos_ - start)).numerator();
    if (v < 1 || static_cast<std::size_t>(v) > limit) {
      fail(what + " index out of range 1.." + std::to_string(limit));
    }
    return static_cast<std::size_t>(v - 1);
  }

  Expression primary(bool& is_lform) {
    if (at_digit()) return Expression::constant(to_double(rational()));
    if (accept('(')) {
      Expression e = expr();
      expect(')');
      return e;
    }
    const std::string name = identifier();
    if (name.empty()) fail("expected a number, identifier or '('");
    const std::size_t n = polytope_.dim();
    if (name == "x") return Expression::variable(n, index(n, "x"));
    if (name == "lF") {
      const auto& facets = polytope_.facets();
      const std::size_t f = index(facets.size(), "lF");
      std::vector<double> c;
      for (long long v : facets[f].normal) c.push_back(static_cast<double>(v));
      is_lform = true;
      return Expression::affine(std::move(c), to_double(facets[f].offset()),
                                "lF" + std::to_string(f + 1));
    }
    if (name == "sin" || name == "cos" || name == "exp" || name == "cutoff") {
      expect('(');
      Expression arg = expr();
      expect(')');
      if (name == "sin") return Expression::sin(arg);
      if (name == "cos") return Expression::cos(arg);
      if (name == "exp") return Expression::exp(arg);
      return Expression::cutoff(arg);
    }
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  const ToricPolytope& polytope_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text, const ToricPolytope& polytope) {
  return Parser(text, polytope).parse();
}

}  // namespace btq
