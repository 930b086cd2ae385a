#include "phfem/expression.hpp"

#include "phfem/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace phfem
{

struct Expression::Node
{
  enum class Kind
  {
    Number,
    X,
    Y,
    T,
    Unary,
    Binary,
    Call1,
    Call2,
    If,
  };

  Kind kind = Kind::Number;
  double value = 0.0;
  std::string op;
  double (*f1)(double) = nullptr;
  double (*f2)(double, double) = nullptr;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double x, double y, double t) const;
};

double Expression::Node::eval(double x, double y, double t) const
{
  switch (kind)
  {
  case Kind::Number:
    return value;
  case Kind::X:
    return x;
  case Kind::Y:
    return y;
  case Kind::T:
    return t;
  case Kind::Unary:
  {
    const double a = args[0]->eval(x, y, t);
    if (op == "-")
      return -a;
    return a == 0.0 ? 1.0 : 0.0; // not
  }
  case Kind::Binary:
  {
    // Short-circuit logic.
    if (op == "and")
      return args[0]->eval(x, y, t) != 0.0 && args[1]->eval(x, y, t) != 0.0 ? 1.0 : 0.0;
    if (op == "or")
      return args[0]->eval(x, y, t) != 0.0 || args[1]->eval(x, y, t) != 0.0 ? 1.0 : 0.0;
    const double a = args[0]->eval(x, y, t);
    const double b = args[1]->eval(x, y, t);
    switch (op[0])
    {
    case '+':
      return a + b;
    case '-':
      return a - b;
    case '*':
      return a * b;
    case '/':
      return a / b;
    case '^':
      return std::pow(a, b);
    case '<':
      return (op == "<=" ? a <= b : a < b) ? 1.0 : 0.0;
    case '>':
      return (op == ">=" ? a >= b : a > b) ? 1.0 : 0.0;
    case '=':
      return a == b ? 1.0 : 0.0;
    case '!':
      return a != b ? 1.0 : 0.0;
    }
    return 0.0;
  }
  case Kind::Call1:
    return f1(args[0]->eval(x, y, t));
  case Kind::Call2:
    return f2(args[0]->eval(x, y, t), args[1]->eval(x, y, t));
  case Kind::If:
    return args[0]->eval(x, y, t) != 0.0 ? args[1]->eval(x, y, t) : args[2]->eval(x, y, t);
  }
  return 0.0;
}

namespace
{

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

struct Token
{
  enum class Kind
  {
    Number,
    Name,
    Symbol,
    End,
  };
  Kind kind;
  std::string text;
  double value = 0.0;
  std::size_t column = 0; // 1-based
};

double f_abs(double a) { return std::abs(a); }
double f_min(double a, double b) { return std::min(a, b); }
double f_max(double a, double b) { return std::max(a, b); }

using F1 = double (*)(double);
using F2 = double (*)(double, double);

F1 unary_function(std::string_view name)
{
  static const std::map<std::string, F1, std::less<>> table = {
      {"sin", [](double a) { return std::sin(a); }},
      {"cos", [](double a) { return std::cos(a); }},
      {"tan", [](double a) { return std::tan(a); }},
      {"asin", [](double a) { return std::asin(a); }},
      {"acos", [](double a) { return std::acos(a); }},
      {"atan", [](double a) { return std::atan(a); }},
      {"sinh", [](double a) { return std::sinh(a); }},
      {"cosh", [](double a) { return std::cosh(a); }},
      {"tanh", [](double a) { return std::tanh(a); }},
      {"exp", [](double a) { return std::exp(a); }},
      {"log", [](double a) { return std::log(a); }},
      {"sqrt", [](double a) { return std::sqrt(a); }},
      {"abs", f_abs},
  };
  const auto it = table.find(name);
  return it == table.end() ? nullptr : it->second;
}

F2 binary_function(std::string_view name)
{
  static const std::map<std::string, F2, std::less<>> table = {
      {"pow", [](double a, double b) { return std::pow(a, b); }},
      {"atan2", [](double a, double b) { return std::atan2(a, b); }},
      {"min", f_min},
      {"max", f_max},
  };
  const auto it = table.find(name);
  return it == table.end() ? nullptr : it->second;
}

class Parser
{
public:
  Parser(std::string_view text, const Expression::Constants & constants, std::size_t line)
      : text_(text), constants_(constants), line_(line)
  {
    tokenize();
  }

  NodePtr parse()
  {
    NodePtr root = expr();
    if (peek().kind != Token::Kind::End)
      fail(peek(), "unexpected '" + peek().text + "'");
    return root;
  }

  bool uses_x = false, uses_y = false, uses_t = false;

private:
  [[noreturn]] void fail(const Token & tok, const std::string & msg) const
  {
    throw ParseError(line_, "column " + std::to_string(tok.column) + ": " + msg + " in '" +
                                std::string(text_) + "'");
  }

  void tokenize()
  {
    std::size_t i = 0;
    while (i < text_.size())
    {
      const char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c)))
      {
        ++i;
        continue;
      }
      Token tok{Token::Kind::Symbol, "", 0.0, i + 1};
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && i + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i + 1]))))
      {
        const std::string rest(text_.substr(i));
        char * end = nullptr;
        tok.value = std::strtod(rest.c_str(), &end);
        const std::size_t len = static_cast<std::size_t>(end - rest.c_str());
        tok.kind = Token::Kind::Number;
        tok.text = rest.substr(0, len);
        i += len;
      }
      else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      {
        std::size_t j = i;
        while (j < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
          ++j;
        tok.kind = Token::Kind::Name;
        tok.text = std::string(text_.substr(i, j - i));
        i = j;
      }
      else
      {
        static const std::map<std::string, std::string, std::less<>> two = {
            {"<=", "<="}, {">=", ">="}, {"==", "=="}, {"!=", "!="},
            {"**", "^"},  {"&&", "and"}, {"||", "or"}};
        if (const auto it = two.find(text_.substr(i, 2)); it != two.end())
        {
          tok.text = it->second;
          i += 2;
        }
        else
        {
          if (std::string_view("+-*/^()<>,[]!").find(c) == std::string_view::npos)
            fail(tok, std::string("unexpected character '") + c + "'");
          tok.text = std::string(1, c);
          i += 1;
        }
      }
      tokens_.push_back(std::move(tok));
    }
    tokens_.push_back({Token::Kind::End, "end of input", 0.0, text_.size() + 1});
  }

  const Token & peek() const { return tokens_[pos_]; }
  const Token & next() { return tokens_[pos_++]; }

  bool accept(std::string_view s)
  {
    const Token & tok = peek();
    if ((tok.kind == Token::Kind::Symbol || tok.kind == Token::Kind::Name) && tok.text == s)
    {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(std::string_view s)
  {
    if (!accept(s))
      fail(peek(), "expected '" + std::string(s) + "' but found '" + peek().text + "'");
  }

  static NodePtr make(Node::Kind kind, std::string op, std::vector<NodePtr> args)
  {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->op = std::move(op);
    n->args = std::move(args);
    return n;
  }

  static NodePtr number(double v)
  {
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
  }

  NodePtr expr()
  {
    if (accept("if"))
    {
      NodePtr cond = expr();
      expect("then");
      NodePtr a = expr();
      expect("else");
      NodePtr b = expr();
      return make(Node::Kind::If, "if", {cond, a, b});
    }
    return logic_or();
  }

  NodePtr logic_or()
  {
    NodePtr a = logic_and();
    while (accept("or"))
      a = make(Node::Kind::Binary, "or", {a, logic_and()});
    return a;
  }

  NodePtr logic_and()
  {
    NodePtr a = comparison();
    while (accept("and"))
      a = make(Node::Kind::Binary, "and", {a, comparison()});
    return a;
  }

  NodePtr comparison()
  {
    NodePtr a = sum();
    for (const char * op : {"<=", ">=", "==", "!=", "<", ">"})
      if (accept(op))
        return make(Node::Kind::Binary, op, {a, sum()});
    return a;
  }

  NodePtr sum()
  {
    NodePtr a = product();
    for (;;)
    {
      if (accept("+"))
        a = make(Node::Kind::Binary, "+", {a, product()});
      else if (accept("-"))
        a = make(Node::Kind::Binary, "-", {a, product()});
      else
        return a;
    }
  }

  NodePtr product()
  {
    NodePtr a = unary();
    for (;;)
    {
      if (accept("*"))
        a = make(Node::Kind::Binary, "*", {a, unary()});
      else if (accept("/"))
        a = make(Node::Kind::Binary, "/", {a, unary()});
      else
        return a;
    }
  }

  NodePtr unary()
  {
    if (accept("-"))
      return make(Node::Kind::Unary, "-", {unary()});
    if (accept("+"))
      return unary();
    if (accept("not") || accept("!"))
      return make(Node::Kind::Unary, "not", {unary()});
    return power();
  }

  NodePtr power()
  {
    NodePtr a = primary();
    if (accept("^"))
      return make(Node::Kind::Binary, "^", {a, unary()});
    return a;
  }

  NodePtr primary()
  {
    const Token & tok = next();
    if (tok.kind == Token::Kind::Number)
      return number(tok.value);
    if (tok.kind == Token::Kind::Symbol && tok.text == "(")
    {
      NodePtr a = expr();
      expect(")");
      return a;
    }
    if (tok.kind != Token::Kind::Name)
      fail(tok, "unexpected '" + tok.text + "'");

    const std::string & name = tok.text;
    if (accept("("))
    {
      std::vector<NodePtr> args{expr()};
      while (accept(","))
        args.push_back(expr());
      expect(")");
      if (F1 f = unary_function(name))
      {
        if (args.size() != 1)
          fail(tok, name + " takes 1 argument");
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Call1;
        n->f1 = f;
        n->args = std::move(args);
        return n;
      }
      if (F2 f = binary_function(name))
      {
        if (args.size() != 2)
          fail(tok, name + " takes 2 arguments");
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Call2;
        n->f2 = f;
        n->args = std::move(args);
        return n;
      }
      fail(tok, "unknown function '" + name + "'");
    }
    if (name == "x" && accept("["))
    {
      const Token & idx = next();
      if (idx.kind != Token::Kind::Number || (idx.value != 0.0 && idx.value != 1.0))
        fail(idx, "x[] index must be 0 or 1");
      expect("]");
      return variable(idx.value == 0.0 ? Node::Kind::X : Node::Kind::Y);
    }
    if (const auto it = constants_.find(name); it != constants_.end())
      return number(it->second);
    if (name == "x")
      return variable(Node::Kind::X);
    if (name == "y")
      return variable(Node::Kind::Y);
    if (name == "t")
      return variable(Node::Kind::T);
    if (name == "pi")
      return number(std::numbers::pi);
    fail(tok, "unknown name '" + name + "'");
  }

  NodePtr variable(Node::Kind kind)
  {
    uses_x |= kind == Node::Kind::X;
    uses_y |= kind == Node::Kind::Y;
    uses_t |= kind == Node::Kind::T;
    auto n = std::make_shared<Node>();
    n->kind = kind;
    return n;
  }

  std::string_view text_;
  const Expression::Constants & constants_;
  std::size_t line_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

} // namespace

Expression Expression::parse(std::string_view text, const Constants & constants, std::size_t line)
{
  Parser p(text, constants, line);
  Expression e;
  e.root_ = p.parse();
  e.text_ = std::string(text);
  e.uses_x_ = p.uses_x;
  e.uses_y_ = p.uses_y;
  e.uses_t_ = p.uses_t;
  return e;
}

double Expression::operator()(double x, double y, double t) const
{
  return root_->eval(x, y, t);
}

} // namespace phfem
