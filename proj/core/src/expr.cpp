#include "funk/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <system_error>
#include <utility>

#include "funk/errors.hpp"

namespace funk::expr {

Ast number(double v) { return std::make_shared<const Node>(Node{Op::Number, v, 0, 0, nullptr, nullptr}); }
Ast var_x(int index) { return std::make_shared<const Node>(Node{Op::VarX, 0.0, index, 0, nullptr, nullptr}); }
Ast var_y(int index) { return std::make_shared<const Node>(Node{Op::VarY, 0.0, index, 0, nullptr, nullptr}); }
Ast metric() { return std::make_shared<const Node>(Node{Op::Metric, 0.0, 0, 0, nullptr, nullptr}); }
Ast binary(Op op, Ast lhs, Ast rhs) {
  return std::make_shared<const Node>(Node{op, 0.0, 0, 0, std::move(lhs), std::move(rhs)});
}
Ast negate(Ast operand) {
  return std::make_shared<const Node>(Node{Op::Neg, 0.0, 0, 0, std::move(operand), nullptr});
}
Ast power(Ast base, int exponent) {
  return std::make_shared<const Node>(Node{Op::Pow, 0.0, 0, exponent, std::move(base), nullptr});
}
Ast sqrt(Ast operand) {
  return std::make_shared<const Node>(Node{Op::Sqrt, 0.0, 0, 0, std::move(operand), nullptr});
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
};

class Parser {
 public:
  Parser(std::string_view src, int n, bool allow_metric)
      : src_(src), n_(n), allow_metric_(allow_metric) {
    advance();
  }

  Ast parse_all() {
    if (current_.kind == Tok::End) throw ParseError(current_.offset, "empty expression");
    Ast result = parse_expr();
    if (current_.kind == Tok::RParen) throw ParseError(current_.offset, "unbalanced ')'");
    if (current_.kind != Tok::End) {
      throw ParseError(current_.offset, "unexpected token '" + std::string(current_.text) + "'");
    }
    return result;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    current_.offset = pos_;
    if (pos_ >= src_.size()) {
      current_ = {Tok::End, pos_, {}};
      return;
    }
    const char c = src_[pos_];
    auto single = [&](Tok kind) {
      current_ = {kind, pos_, src_.substr(pos_, 1)};
      ++pos_;
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    const std::size_t start = pos_;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto digits = [&] {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      };
      digits();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digits();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          digits();
        } else {
          pos_ = save;
        }
      }
      current_ = {Tok::Number, start, src_.substr(start, pos_ - start)};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      current_ = {Tok::Ident, start, src_.substr(start, pos_ - start)};
      return;
    }
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  }

  Ast parse_expr() {
    Ast lhs = parse_term();
    while (current_.kind == Tok::Plus || current_.kind == Tok::Minus) {
      const Op op = current_.kind == Tok::Plus ? Op::Add : Op::Sub;
      advance();
      lhs = binary(op, lhs, parse_term());
    }
    return lhs;
  }

  Ast parse_term() {
    Ast lhs = parse_unary();
    while (current_.kind == Tok::Star || current_.kind == Tok::Slash) {
      const Op op = current_.kind == Tok::Star ? Op::Mul : Op::Div;
      advance();
      lhs = binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  Ast parse_unary() {
    if (current_.kind == Tok::Minus) {
      advance();
      return negate(parse_unary());
    }
    return parse_power();
  }

  Ast parse_power() {
    Ast base = parse_atom();
    if (current_.kind == Tok::Caret) {
      advance();
      return power(base, parse_exponent());
    }
    return base;
  }

  int parse_exponent() {
    const std::size_t at = current_.offset;
    bool negative = false;
    if (current_.kind == Tok::Minus) {
      negative = true;
      advance();
    }
    if (current_.kind != Tok::Number) throw ParseError(current_.offset, "expected integer exponent");
    int value = 0;
    const auto text = current_.text;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError(current_.offset, "exponent must be an integer");
    }
    advance();
    if (negative) value = -value;
    if (current_.kind == Tok::Caret) {
      advance();
      const int outer = parse_exponent();
      if (outer < 0) throw ParseError(at, "exponent must be an integer");
      double folded = std::pow(static_cast<double>(value), outer);
      if (std::abs(folded) > 1e6) throw ParseError(at, "exponent too large");
      value = static_cast<int>(folded);
    }
    return value;
  }

  Ast parse_atom() {
    const Token tok = current_;
    switch (tok.kind) {
      case Tok::Number: {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
        if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
          throw ParseError(tok.offset, "malformed number '" + std::string(tok.text) + "'");
        }
        advance();
        return number(v);
      }
      case Tok::Ident:
        return parse_ident(tok);
      case Tok::LParen: {
        advance();
        if (current_.kind == Tok::RParen) throw ParseError(current_.offset, "empty argument");
        Ast inner = parse_expr();
        expect_close(tok.offset);
        return inner;
      }
      case Tok::RParen:
        throw ParseError(tok.offset, "unbalanced ')'");
      case Tok::End:
        throw ParseError(tok.offset, "unexpected end of expression");
      default:
        throw ParseError(tok.offset, "unexpected token '" + std::string(tok.text) + "'");
    }
  }

  Ast parse_ident(const Token& tok) {
    const auto name = tok.text;
    if (name == "sqrt") {
      advance();
      if (current_.kind != Tok::LParen) throw ParseError(current_.offset, "expected '(' after sqrt");
      const std::size_t open = current_.offset;
      advance();
      if (current_.kind == Tok::RParen) throw ParseError(current_.offset, "empty argument");
      Ast inner = parse_expr();
      expect_close(open);
      return sqrt(inner);
    }
    if (name == "F") {
      if (!allow_metric_) throw ParseError(tok.offset, "F is not allowed in this expression");
      advance();
      return metric();
    }
    if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1) {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec == std::errc() && ptr == name.data() + name.size()) {
        if (index < 1 || index > n_) throw ParseError(tok.offset, "index out of range");
        advance();
        return name[0] == 'x' ? var_x(index - 1) : var_y(index - 1);
      }
    }
    throw ParseError(tok.offset, "unknown identifier '" + std::string(name) + "'");
  }

  void expect_close(std::size_t open_offset) {
    if (current_.kind != Tok::RParen) {
      throw ParseError(current_.kind == Tok::End ? open_offset : current_.offset,
                       "unbalanced '(': expected ')'");
    }
    advance();
  }

  std::string_view src_;
  int n_;
  bool allow_metric_;
  std::size_t pos_ = 0;
  Token current_;
};

int precedence(const Node& node) {
  switch (node.op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    case Op::Number:
      return node.number < 0.0 || std::signbit(node.number) ? 3 : 5;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void print(const Node& node, std::string& out);

void print_child(const Node& child, bool paren, std::string& out) {
  if (paren) out += '(';
  print(child, out);
  if (paren) out += ')';
}

void print(const Node& node, std::string& out) {
  switch (node.op) {
    case Op::Number:
      out += format_number(node.number);
      return;
    case Op::VarX:
      out += "x" + std::to_string(node.index + 1);
      return;
    case Op::VarY:
      out += "y" + std::to_string(node.index + 1);
      return;
    case Op::Metric:
      out += "F";
      return;
    case Op::Sqrt:
      out += "sqrt(";
      print(*node.lhs, out);
      out += ')';
      return;
    case Op::Neg:
      out += '-';
      print_child(*node.lhs, precedence(*node.lhs) < 3, out);
      return;
    case Op::Pow:
      print_child(*node.lhs, precedence(*node.lhs) < 5, out);
      out += '^';
      out += std::to_string(node.exponent);
      return;
    default: {
      const int p = precedence(node);
      print_child(*node.lhs, precedence(*node.lhs) < p, out);
      switch (node.op) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += '*'; break;
        default: out += '/'; break;
      }
      print_child(*node.rhs, precedence(*node.rhs) <= p, out);
    }
  }
}

}  // namespace

Ast parse(std::string_view source, int n, bool allow_metric) {
  if (n < 1) throw std::invalid_argument("expression dimension must be positive");
  return Parser(source, n, allow_metric).parse_all();
}

std::string to_string(const Ast& ast) {
  std::string out;
  print(*ast, out);
  return out;
}

std::string to_sexpr(const Ast& ast) {
  const Node& node = *ast;
  switch (node.op) {
    case Op::Number: return format_number(node.number);
    case Op::VarX: return "x" + std::to_string(node.index + 1);
    case Op::VarY: return "y" + std::to_string(node.index + 1);
    case Op::Metric: return "F";
    case Op::Sqrt: return "(sqrt " + to_sexpr(node.lhs) + ")";
    case Op::Neg: return "(- " + to_sexpr(node.lhs) + ")";
    case Op::Pow: return "(^ " + to_sexpr(node.lhs) + " " + std::to_string(node.exponent) + ")";
    case Op::Add: return "(+ " + to_sexpr(node.lhs) + " " + to_sexpr(node.rhs) + ")";
    case Op::Sub: return "(- " + to_sexpr(node.lhs) + " " + to_sexpr(node.rhs) + ")";
    case Op::Mul: return "(* " + to_sexpr(node.lhs) + " " + to_sexpr(node.rhs) + ")";
    case Op::Div: return "(/ " + to_sexpr(node.lhs) + " " + to_sexpr(node.rhs) + ")";
  }
  return {};
}

bool mentions_metric(const Ast& ast) {
  if (!ast) return false;
  return ast->op == Op::Metric || mentions_metric(ast->lhs) || mentions_metric(ast->rhs);
}

bool structurally_equal(const Ast& a, const Ast& b) {
  if (!a || !b) return !a && !b;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Number:
      if (a->number != b->number) return false;
      break;
    case Op::VarX:
    case Op::VarY:
      if (a->index != b->index) return false;
      break;
    case Op::Pow:
      if (a->exponent != b->exponent) return false;
      break;
    default:
      break;
  }
  return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
}

double evaluate(const Ast& ast, std::span<const double> x, std::span<const double> y,
                std::optional<double> metric_value) {
  const Node& node = *ast;
  auto sub = [&](const Ast& a) { return evaluate(a, x, y, metric_value); };
  switch (node.op) {
    case Op::Number: return node.number;
    case Op::VarX: return x[static_cast<std::size_t>(node.index)];
    case Op::VarY: return y[static_cast<std::size_t>(node.index)];
    case Op::Metric:
      if (!metric_value) throw CompileError("expression uses F but no metric is bound");
      return *metric_value;
    case Op::Add: return sub(node.lhs) + sub(node.rhs);
    case Op::Sub: return sub(node.lhs) - sub(node.rhs);
    case Op::Mul: return sub(node.lhs) * sub(node.rhs);
    case Op::Div: {
      const double d = sub(node.rhs);
      if (d == 0.0) throw DomainError("division by zero");
      return sub(node.lhs) / d;
    }
    case Op::Neg: return -sub(node.lhs);
    case Op::Pow: {
      const double b = sub(node.lhs);
      if (node.exponent < 0 && b == 0.0) throw DomainError("division by zero");
      return std::pow(b, node.exponent);
    }
    case Op::Sqrt: {
      const double a = sub(node.lhs);
      if (!(a > 0.0)) throw DomainError("sqrt of a non-positive value");
      return std::sqrt(a);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

Jet eval_jet(const Node& node, const JetVars& v, const std::optional<Jet>& metric_jet) {
  auto sub = [&](const Ast& a) { return eval_jet(*a, v, metric_jet); };
  switch (node.op) {
    case Op::Number: return v.constant(node.number);
    case Op::VarX: return v.x[static_cast<std::size_t>(node.index)];
    case Op::VarY: return v.y[static_cast<std::size_t>(node.index)];
    case Op::Metric: return *metric_jet;
    case Op::Add: return sub(node.lhs) + sub(node.rhs);
    case Op::Sub: return sub(node.lhs) - sub(node.rhs);
    case Op::Mul: return sub(node.lhs) * sub(node.rhs);
    case Op::Div: return sub(node.lhs) / sub(node.rhs);
    case Op::Neg: return -sub(node.lhs);
    case Op::Pow: return pow(sub(node.lhs), node.exponent);
    case Op::Sqrt: return funk::sqrt(sub(node.lhs));
  }
  throw std::logic_error("unhandled expression node");
}

int max_index(const Ast& ast) {
  if (!ast) return -1;
  int m = (ast->op == Op::VarX || ast->op == Op::VarY) ? ast->index : -1;
  return std::max({m, max_index(ast->lhs), max_index(ast->rhs)});
}

}  // namespace

ScalarField compile(const Ast& ast, const std::optional<ScalarField>& metric_binding,
                    std::optional<int> degree) {
  const bool uses_metric = mentions_metric(ast);
  if (uses_metric && !metric_binding) throw CompileError("expression uses F but no metric is bound");
  const int needed = max_index(ast) + 1;
  const auto metric = uses_metric ? std::make_shared<const ScalarField>(*metric_binding) : nullptr;
  auto eval = [ast, metric, needed](const JetVars& v) {
    if (v.n() < needed) throw DomainError("expression refers to a coordinate beyond the dimension");
    std::optional<Jet> metric_jet;
    if (metric) metric_jet = metric->evaluate(v);
    return eval_jet(*ast, v, metric_jet);
  };
  ScalarField::DomainPredicate domain;
  if (metric && metric->has_domain()) {
    domain = [metric](std::span<const double> x) { return metric->in_domain(x); };
  }
  return ScalarField(to_string(ast), std::move(eval), degree, std::move(domain));
}

}  // namespace funk::expr
