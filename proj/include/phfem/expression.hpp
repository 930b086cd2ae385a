#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace phfem
{

/// Compiled arithmetic expression in the variables x, y (also x[0], x[1])
/// and t.
///
///   expr    := 'if' expr 'then' expr 'else' expr | or
///   or      := and ('or' and)*
///   and     := cmp ('and' cmp)*
///   cmp     := sum (('<' | '<=' | '>' | '>=' | '==' | '!=') sum)?
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := ('-' | '+' | 'not') unary | power
///   power   := primary (('^' | '**') unary)?
///   primary := number | name | name '(' expr (',' expr)* ')' | 'x' '[' 0|1 ']' | '(' expr ')'
///
/// Functions: sin cos tan asin acos atan atan2 sinh cosh tanh exp log sqrt abs
/// pow min max. Constant `pi` plus any named constants passed to parse.
/// Comparisons and logic yield 1 or 0; any nonzero value is true.
class Expression
{
public:
  using Constants = std::map<std::string, double, std::less<>>;

  /// Throws ParseError(line, message) with the column in the message.
  static Expression parse(std::string_view text, const Constants & constants = {},
                          std::size_t line = 0);

  double operator()(double x, double y, double t) const;

  bool uses_x() const { return uses_x_; }
  bool uses_y() const { return uses_y_; }
  bool uses_t() const { return uses_t_; }
  bool is_constant() const { return !uses_x_ && !uses_y_ && !uses_t_; }
  const std::string & text() const { return text_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  bool uses_x_ = false;
  bool uses_y_ = false;
  bool uses_t_ = false;
};

} // namespace phfem
