#include "curvlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "curvlab/error.hpp"

namespace curvlab {

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_leaf(NodeKind kind, double number, int symbol) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->number = number;
  n->symbol = symbol;
  return n;
}

NodePtr make_unary(NodeKind kind, NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& coords,
         const std::vector<std::string>& params)
      : text_(text), coords_(coords), params_(params) {}

  NodePtr parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = parse_expr();
    skip_space();
    if (pos_ < text_.size()) {
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
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

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(NodeKind::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_binary(NodeKind::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(NodeKind::mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(NodeKind::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_unary(NodeKind::negate, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    while (accept('^')) {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::power;
      n->lhs = base;
      n->exponent = parse_exponent();
      base = n;
    }
    return base;
  }

  int parse_exponent() {
    skip_space();
    const bool parenthesized = accept('(');
    skip_space();
    const std::size_t start = pos_;
    int sign = 1;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      if (text_[pos_] == '-') sign = -1;
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) throw ParseError("expected integer exponent", start);
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      throw ParseError("exponent must be an integer", start);
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, value);
    if (ec != std::errc() || value > kMaxExponent) {
      throw ParseError("exponent magnitude exceeds " + std::to_string(kMaxExponent), start);
    }
    if (parenthesized) expect(')');
    return sign * value;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    if (literal == ".") throw ParseError("malformed number", start);
    // strtod honors the "C" locale numeric format used by the printer.
    char* end = nullptr;
    const double value = std::strtod(literal.c_str(), &end);
    if (end != literal.c_str() + literal.size()) throw ParseError("malformed number", start);
    return make_leaf(NodeKind::number, value, 0);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));

    static const std::pair<const char*, Function> functions[] = {
        {"sin", Function::sin}, {"cos", Function::cos}, {"exp", Function::exp},
        {"sqrt", Function::sqrt}};
    for (const auto& [fname, fn] : functions) {
      if (name == fname) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
          ++pos_;
          auto n = std::make_shared<Node>();
          n->kind = NodeKind::call;
          n->function = fn;
          n->lhs = parse_expr();
          expect(')');
          return n;
        }
        throw ParseError("function '" + name + "' requires an argument list", pos_);
      }
    }

    if (auto it = std::find(coords_.begin(), coords_.end(), name); it != coords_.end()) {
      return make_leaf(NodeKind::coordinate, 0.0, static_cast<int>(it - coords_.begin()));
    }
    if (auto it = std::find(params_.begin(), params_.end(), name); it != params_.end()) {
      return make_leaf(NodeKind::parameter, 0.0, static_cast<int>(it - params_.begin()));
    }
    throw UnknownSymbolError(name);
  }

  std::string_view text_;
  const std::vector<std::string>& coords_;
  const std::vector<std::string>& params_;
  std::size_t pos_ = 0;
};

const char* function_name(Function f) {
  switch (f) {
    case Function::sin:
      return "sin";
    case Function::cos:
      return "cos";
    case Function::exp:
      return "exp";
    case Function::sqrt:
      return "sqrt";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const Node& n, const Expr& e, std::string& out) {
  switch (n.kind) {
    case NodeKind::number:
      out += format_number(n.number);
      return;
    case NodeKind::coordinate:
      out += e.coordinates()[static_cast<std::size_t>(n.symbol)];
      return;
    case NodeKind::parameter:
      out += e.parameters()[static_cast<std::size_t>(n.symbol)];
      return;
    case NodeKind::negate:
      out += "(-";
      print(*n.lhs, e, out);
      out += ")";
      return;
    case NodeKind::add:
    case NodeKind::sub:
    case NodeKind::mul:
    case NodeKind::div: {
      static constexpr const char* ops[] = {" + ", " - ", " * ", " / "};
      out += "(";
      print(*n.lhs, e, out);
      out += ops[static_cast<int>(n.kind) - static_cast<int>(NodeKind::add)];
      print(*n.rhs, e, out);
      out += ")";
      return;
    }
    case NodeKind::power:
      print(*n.lhs, e, out);
      out += n.exponent < 0 ? "^(" + std::to_string(n.exponent) + ")"
                            : "^" + std::to_string(n.exponent);
      return;
    case NodeKind::call:
      out += function_name(n.function);
      out += "(";
      print(*n.lhs, e, out);
      out += ")";
      return;
  }
}

int node_depth(const Node& n) {
  int d = 0;
  if (n.lhs) d = std::max(d, 1 + node_depth(*n.lhs));
  if (n.rhs) d = std::max(d, 1 + node_depth(*n.rhs));
  return d;
}

bool node_uses(const Node& n, int coord) {
  if (n.kind == NodeKind::coordinate) return n.symbol == coord;
  return (n.lhs && node_uses(*n.lhs, coord)) || (n.rhs && node_uses(*n.rhs, coord));
}

bool nodes_equal(const Node& a, const Expr& ea, const Node& b, const Expr& eb) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::number:
      return a.number == b.number;
    case NodeKind::coordinate:
      return ea.coordinates()[static_cast<std::size_t>(a.symbol)] ==
             eb.coordinates()[static_cast<std::size_t>(b.symbol)];
    case NodeKind::parameter:
      return ea.parameters()[static_cast<std::size_t>(a.symbol)] ==
             eb.parameters()[static_cast<std::size_t>(b.symbol)];
    case NodeKind::power:
      if (a.exponent != b.exponent) return false;
      break;
    case NodeKind::call:
      if (a.function != b.function) return false;
      break;
    default:
      break;
  }
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !nodes_equal(*a.lhs, ea, *b.lhs, eb)) return false;
  if (a.rhs && !nodes_equal(*a.rhs, ea, *b.rhs, eb)) return false;
  return true;
}

struct Evaluator {
  const Expr& expr;
  const std::vector<Jet>& coords;
  const std::vector<double>& params;
  int dim;
  int order;

  std::string text(const Node& n) const {
    std::string out;
    print(n, expr, out);
    return out;
  }

  Jet eval(const Node& n) const {
    switch (n.kind) {
      case NodeKind::number:
        return Jet::constant(dim, order, n.number);
      case NodeKind::coordinate:
        return coords[static_cast<std::size_t>(n.symbol)];
      case NodeKind::parameter:
        return Jet::constant(dim, order, params[static_cast<std::size_t>(n.symbol)]);
      case NodeKind::negate:
        return -eval(*n.lhs);
      case NodeKind::add:
        return eval(*n.lhs) + eval(*n.rhs);
      case NodeKind::sub:
        return eval(*n.lhs) - eval(*n.rhs);
      case NodeKind::mul:
        return eval(*n.lhs) * eval(*n.rhs);
      case NodeKind::div: {
        Jet denom = eval(*n.rhs);
        if (denom.value() == 0.0) throw DomainError("division by zero", text(*n.rhs));
        return eval(*n.lhs) * reciprocal(denom);
      }
      case NodeKind::power: {
        Jet base = eval(*n.lhs);
        if (n.exponent < 0 && base.value() == 0.0) {
          throw DomainError("division by zero", text(n));
        }
        return pow(base, n.exponent);
      }
      case NodeKind::call: {
        Jet arg = eval(*n.lhs);
        switch (n.function) {
          case Function::sin:
            return sin(arg);
          case Function::cos:
            return cos(arg);
          case Function::exp:
            return exp(arg);
          case Function::sqrt:
            if (arg.value() < 0.0) throw DomainError("sqrt of a negative value", text(n));
            if (arg.value() == 0.0 && order > 0) {
              throw DomainError("sqrt is not differentiable at zero", text(n));
            }
            return sqrt(arg);
        }
      }
    }
    throw Error("corrupt expression tree");
  }
};

}  // namespace

Expr Expr::parse(std::string_view text, std::vector<std::string> coords,
                 std::vector<std::string> params) {
  std::set<std::string> seen;
  for (const auto& name : coords) {
    if (!seen.insert(name).second) throw Error("duplicate symbol name \"" + name + "\"");
  }
  for (const auto& name : params) {
    if (!seen.insert(name).second) throw Error("duplicate symbol name \"" + name + "\"");
  }
  NodePtr root = Parser(text, coords, params).parse();
  return Expr(std::move(root), std::move(coords), std::move(params));
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, *this, out);
  return out;
}

int Expr::depth() const { return node_depth(*root_); }

bool Expr::depends_on_coordinate(int index) const { return node_uses(*root_, index); }

bool operator==(const Expr& a, const Expr& b) {
  return nodes_equal(*a.root_, a, *b.root_, b);
}

Jet eval_jet(const Expr& e, std::span<const double> point, const ParamValues& params,
             int order) {
  const int dim = static_cast<int>(e.coordinates().size());
  if (static_cast<int>(point.size()) != dim) {
    throw ShapeError("point has " + std::to_string(point.size()) + " coordinates, expression has " +
                     std::to_string(dim));
  }
  if (order < 0 || order > kMaxJetOrder) throw ShapeError("jet order out of range");
  std::vector<double> values;
  values.reserve(e.parameters().size());
  for (const auto& name : e.parameters()) {
    auto it = params.find(name);
    if (it == params.end()) throw Error("parameter \"" + name + "\" is not bound");
    values.push_back(it->second);
  }
  // Jets need at least one variable; a coordinate-free expression is evaluated
  // in a one-dimensional dummy space.
  const int jet_dim = std::max(dim, 1);
  std::vector<Jet> coords;
  coords.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    coords.push_back(Jet::variable(jet_dim, order, i, point[static_cast<std::size_t>(i)]));
  }
  Evaluator ev{e, coords, values, jet_dim, order};
  return ev.eval(e.root());
}

double eval(const Expr& e, std::span<const double> point, const ParamValues& params) {
  return eval_jet(e, point, params, 0).value();
}

}  // namespace curvlab
