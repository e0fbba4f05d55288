#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vnc/errors.hpp"
#include "vnc/types.hpp"

namespace vnc {

/// Minimal arithmetic expressions over named coordinates: literals, symbols,
/// + - * /, unary minus, sin, cos, pow, parentheses, and the constant pi.
/// Expressions are immutable; derivative() differentiates symbolically so
/// file-defined fields get exact jacobians instead of finite differences.
class Expression {
  enum class Kind { Num, Sym, Add, Sub, Mul, Div, Neg, Sin, Cos, Pow };

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    Kind kind;
    double value = 0.0;  // Num
    int symbol = -1;     // Sym
    NodePtr a, b;
  };

  NodePtr root_;

  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static NodePtr num(double v) {
    return std::make_shared<Node>(Node{Kind::Num, v, -1, nullptr, nullptr});
  }
  static NodePtr sym(int index) {
    return std::make_shared<Node>(Node{Kind::Sym, 0.0, index, nullptr, nullptr});
  }
  static NodePtr unary(Kind k, NodePtr a) {
    if (k == Kind::Neg && a->kind == Kind::Num) return num(-a->value);
    return std::make_shared<Node>(Node{k, 0.0, -1, std::move(a), nullptr});
  }
  static NodePtr binary(Kind k, NodePtr a, NodePtr b) {
    const bool an = a->kind == Kind::Num, bn = b->kind == Kind::Num;
    // Constant folding keeps derivatives of constants exactly zero and the
    // trees produced by differentiation small.
    switch (k) {
      case Kind::Add:
        if (an && bn) return num(a->value + b->value);
        if (an && a->value == 0.0) return b;
        if (bn && b->value == 0.0) return a;
        break;
      case Kind::Sub:
        if (an && bn) return num(a->value - b->value);
        if (bn && b->value == 0.0) return a;
        if (an && a->value == 0.0) return unary(Kind::Neg, std::move(b));
        break;
      case Kind::Mul:
        if (an && bn) return num(a->value * b->value);
        if ((an && a->value == 0.0) || (bn && b->value == 0.0)) return num(0.0);
        if (an && a->value == 1.0) return b;
        if (bn && b->value == 1.0) return a;
        break;
      case Kind::Div:
        if (an && a->value == 0.0) return num(0.0);
        if (bn && b->value == 1.0) return a;
        break;
      case Kind::Pow:
        if (bn && b->value == 1.0) return a;
        if (bn && b->value == 0.0) return num(1.0);
        break;
      default:
        break;
    }
    return std::make_shared<Node>(Node{k, 0.0, -1, std::move(a), std::move(b)});
  }

  static double eval_node(const Node& n, const Vector& values) {
    switch (n.kind) {
      case Kind::Num: return n.value;
      case Kind::Sym: return values(n.symbol);
      case Kind::Add: return eval_node(*n.a, values) + eval_node(*n.b, values);
      case Kind::Sub: return eval_node(*n.a, values) - eval_node(*n.b, values);
      case Kind::Mul: return eval_node(*n.a, values) * eval_node(*n.b, values);
      case Kind::Div: return eval_node(*n.a, values) / eval_node(*n.b, values);
      case Kind::Neg: return -eval_node(*n.a, values);
      case Kind::Sin: return std::sin(eval_node(*n.a, values));
      case Kind::Cos: return std::cos(eval_node(*n.a, values));
      case Kind::Pow:
        return std::pow(eval_node(*n.a, values), eval_node(*n.b, values));
    }
    return 0.0;
  }

  static bool node_constant(const Node& n) {
    if (n.kind == Kind::Sym) return false;
    if (n.a && !node_constant(*n.a)) return false;
    if (n.b && !node_constant(*n.b)) return false;
    return true;
  }

  static NodePtr diff_node(const NodePtr& n, int var) {
    switch (n->kind) {
      case Kind::Num: return num(0.0);
      case Kind::Sym: return num(n->symbol == var ? 1.0 : 0.0);
      case Kind::Add: return binary(Kind::Add, diff_node(n->a, var), diff_node(n->b, var));
      case Kind::Sub: return binary(Kind::Sub, diff_node(n->a, var), diff_node(n->b, var));
      case Kind::Mul:
        return binary(Kind::Add, binary(Kind::Mul, diff_node(n->a, var), n->b),
                      binary(Kind::Mul, n->a, diff_node(n->b, var)));
      case Kind::Div:
        return binary(Kind::Div,
                      binary(Kind::Sub, binary(Kind::Mul, diff_node(n->a, var), n->b),
                             binary(Kind::Mul, n->a, diff_node(n->b, var))),
                      binary(Kind::Mul, n->b, n->b));
      case Kind::Neg: return unary(Kind::Neg, diff_node(n->a, var));
      case Kind::Sin:
        return binary(Kind::Mul, unary(Kind::Cos, n->a), diff_node(n->a, var));
      case Kind::Cos:
        return unary(Kind::Neg,
                     binary(Kind::Mul, unary(Kind::Sin, n->a), diff_node(n->a, var)));
      case Kind::Pow: {
        if (!node_constant(*n->b))
          throw ParseError("derivative of pow with a non-constant exponent is unsupported");
        const double e = eval_node(*n->b, Vector());
        return binary(Kind::Mul, num(e),
                      binary(Kind::Mul, binary(Kind::Pow, n->a, num(e - 1.0)),
                             diff_node(n->a, var)));
      }
    }
    return num(0.0);
  }

  // ---- lexer / parser -------------------------------------------------

  struct Token {
    enum class Type { Number, Ident, Plus, Minus, Star, Slash, LParen, RParen, Comma, End };
    Type type;
    double number = 0.0;
    std::string ident;
    int line = 1, column = 1;
  };

  struct Lexer {
    const std::string& text;
    std::size_t pos = 0;
    int line, column;

    Lexer(const std::string& t, int line0, int column0)
        : text(t), line(line0), column(column0) {}

    Token next() {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
        ++pos;
        ++column;
      }
      Token tok;
      tok.line = line;
      tok.column = column;
      if (pos >= text.size()) {
        tok.type = Token::Type::End;
        return tok;
      }
      const char c = text[pos];
      auto single = [&](Token::Type t) {
        tok.type = t;
        ++pos;
        ++column;
        return tok;
      };
      switch (c) {
        case '+': return single(Token::Type::Plus);
        case '-': return single(Token::Type::Minus);
        case '*': return single(Token::Type::Star);
        case '/': return single(Token::Type::Slash);
        case '(': return single(Token::Type::LParen);
        case ')': return single(Token::Type::RParen);
        case ',': return single(Token::Type::Comma);
        default: break;
      }
      if ((c >= '0' && c <= '9') || c == '.') {
        std::size_t end = pos;
        while (end < text.size() &&
               ((text[end] >= '0' && text[end] <= '9') || text[end] == '.'))
          ++end;
        if (end < text.size() && (text[end] == 'e' || text[end] == 'E')) {
          std::size_t e = end + 1;
          if (e < text.size() && (text[e] == '+' || text[e] == '-')) ++e;
          if (e < text.size() && text[e] >= '0' && text[e] <= '9') {
            while (e < text.size() && text[e] >= '0' && text[e] <= '9') ++e;
            end = e;
          }
        }
        double value = 0.0;
        const auto [ptr, ec] =
            std::from_chars(text.data() + pos, text.data() + end, value);
        if (ec != std::errc{} || ptr != text.data() + end)
          throw ParseError("bad number literal", line, column);
        tok.type = Token::Type::Number;
        tok.number = value;
        column += static_cast<int>(end - pos);
        pos = end;
        return tok;
      }
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
        std::size_t end = pos;
        while (end < text.size() &&
               ((text[end] >= 'a' && text[end] <= 'z') ||
                (text[end] >= 'A' && text[end] <= 'Z') ||
                (text[end] >= '0' && text[end] <= '9') || text[end] == '_'))
          ++end;
        tok.type = Token::Type::Ident;
        tok.ident = text.substr(pos, end - pos);
        column += static_cast<int>(end - pos);
        pos = end;
        return tok;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", line, column);
    }
  };

  struct Parser {
    Lexer lexer;
    Token current;
    const std::vector<std::string>& symbols;

    Parser(const std::string& text, const std::vector<std::string>& syms, int line0,
           int column0)
        : lexer(text, line0, column0), symbols(syms) {
      current = lexer.next();
    }

    void advance() { current = lexer.next(); }

    void expect(Token::Type t, const char* what) {
      if (current.type != t)
        throw ParseError(std::string("expected ") + what, current.line, current.column);
      advance();
    }

    NodePtr parse_expression() {
      NodePtr lhs = parse_term();
      while (current.type == Token::Type::Plus || current.type == Token::Type::Minus) {
        const Kind k = current.type == Token::Type::Plus ? Kind::Add : Kind::Sub;
        advance();
        lhs = binary(k, std::move(lhs), parse_term());
      }
      return lhs;
    }

    NodePtr parse_term() {
      NodePtr lhs = parse_factor();
      while (current.type == Token::Type::Star || current.type == Token::Type::Slash) {
        const Kind k = current.type == Token::Type::Star ? Kind::Mul : Kind::Div;
        advance();
        lhs = binary(k, std::move(lhs), parse_factor());
      }
      return lhs;
    }

    NodePtr parse_factor() {
      if (current.type == Token::Type::Minus) {
        advance();
        return unary(Kind::Neg, parse_factor());
      }
      return parse_primary();
    }

    NodePtr parse_primary() {
      if (current.type == Token::Type::Number) {
        const double v = current.number;
        advance();
        return num(v);
      }
      if (current.type == Token::Type::LParen) {
        advance();
        NodePtr inner = parse_expression();
        expect(Token::Type::RParen, "')'");
        return inner;
      }
      if (current.type == Token::Type::Ident) {
        const std::string name = current.ident;
        const int line = current.line, column = current.column;
        advance();
        if (current.type == Token::Type::LParen) {
          advance();
          if (name == "sin" || name == "cos") {
            NodePtr arg = parse_expression();
            expect(Token::Type::RParen, "')'");
            return unary(name == "sin" ? Kind::Sin : Kind::Cos, std::move(arg));
          }
          if (name == "pow") {
            NodePtr base = parse_expression();
            expect(Token::Type::Comma, "','");
            NodePtr exponent = parse_expression();
            expect(Token::Type::RParen, "')'");
            return binary(Kind::Pow, std::move(base), std::move(exponent));
          }
          throw ParseError("unknown function '" + name + "'", line, column);
        }
        if (name == "pi") return num(M_PI);
        for (std::size_t i = 0; i < symbols.size(); ++i)
          if (symbols[i] == name) return sym(static_cast<int>(i));
        throw ParseError("unknown symbol '" + name + "'", line, column);
      }
      throw ParseError("expected a value", current.line, current.column);
    }
  };

 public:
  Expression() : root_(num(0.0)) {}

  /// Parse text against a symbol table (coordinate names). line/column seed
  /// the positions reported in errors, for expressions embedded in files.
  static Expression parse(const std::string& text, const std::vector<std::string>& symbols,
                          int line = 1, int column = 1) {
    Parser parser(text, symbols, line, column);
    NodePtr root = parser.parse_expression();
    if (parser.current.type != Token::Type::End)
      throw ParseError("trailing input after expression", parser.current.line,
                       parser.current.column);
    return Expression(std::move(root));
  }

  double eval(const Vector& values) const { return eval_node(*root_, values); }

  Expression derivative(int symbol) const { return Expression(diff_node(root_, symbol)); }

  bool is_constant() const { return node_constant(*root_); }
};

/// Parse and evaluate an expression with no free symbols (literals, pi,
/// arithmetic); used for values in configuration files and flags.
inline double eval_constant_expression(const std::string& text, int line = 1,
                                       int column = 1) {
  Expression e = Expression::parse(text, {}, line, column);
  return e.eval(Vector());
}

}  // namespace vnc
