#pragma once

// Coordinate-expression language used for metric components and test
// functions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' integer)*          integer: [+-]?digits or '(' [+-]?digits ')'
//   primary := number | symbol | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt
//
// Every symbol must be a declared coordinate or parameter. Exponents are
// integers with |k| <= 16; negative exponents evaluate as reciprocals.

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curvlab/jet.hpp"

namespace curvlab {

inline constexpr int kMaxExponent = 16;

enum class NodeKind { number, coordinate, parameter, negate, add, sub, mul, div, power, call };
enum class Function { sin, cos, exp, sqrt };

struct Node {
  NodeKind kind = NodeKind::number;
  double number = 0.0;   // NodeKind::number
  int symbol = 0;        // coordinate or parameter index
  int exponent = 0;      // NodeKind::power
  Function function = Function::sin;
  std::shared_ptr<const Node> lhs;  // unary operand, call argument, power base
  std::shared_ptr<const Node> rhs;
};

using ParamValues = std::map<std::string, double>;

class Expr {
 public:
  /// Throws ParseError (with byte offset) or UnknownSymbolError.
  static Expr parse(std::string_view text, std::vector<std::string> coords,
                    std::vector<std::string> params = {});

  const Node& root() const { return *root_; }
  const std::vector<std::string>& coordinates() const { return coords_; }
  const std::vector<std::string>& parameters() const { return params_; }

  /// Fully parenthesized text that re-parses to an identical tree.
  std::string to_string() const;
  /// Longest root-to-leaf path counted in edges; a lone literal has depth 0.
  int depth() const;
  bool depends_on_coordinate(int index) const;

  /// Structural equality of the trees (symbol names compared, not indices).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  Expr(std::shared_ptr<const Node> root, std::vector<std::string> coords,
       std::vector<std::string> params)
      : root_(std::move(root)), coords_(std::move(coords)), params_(std::move(params)) {}

  std::shared_ptr<const Node> root_;
  std::vector<std::string> coords_;
  std::vector<std::string> params_;
};

/// Taylor jet of `e` at `point`. Every declared parameter must be bound in
/// `params`. Throws DomainError for division by zero or sqrt of a negative
/// value, naming the offending subexpression.
Jet eval_jet(const Expr& e, std::span<const double> point, const ParamValues& params, int order);

/// Plain value; same as eval_jet(...).value() at order 0.
double eval(const Expr& e, std::span<const double> point, const ParamValues& params);

}  // namespace curvlab
