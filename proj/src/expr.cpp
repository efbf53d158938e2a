#include "halfcell/expr.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>

namespace halfcell {

namespace {

enum class Op { Add, Sub, Mul, Div, Pow, Neg, Call, Const, Var };

}  // namespace

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;
  std::string name;  // variable or function name
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_var(const std::string& name) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Var;
  n->name = name;
  return n;
}

NodePtr make_node(Op op, std::vector<NodePtr> args, const std::string& name = {}) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->name = name;
  n->args = std::move(args);
  return n;
}

struct Token {
  enum Kind { Number, Ident, Sym, End } kind;
  std::string text;
  double number = 0.0;
  int column = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    tok_.column = static_cast<int>(pos_) + 1;
    if (pos_ >= s_.size()) {
      tok_.kind = Token::End;
      tok_.text = "<end>";
      return;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(start, &end);
      if (end == start)
        throw ParseError("malformed number", 1, tok_.column);
      tok_.kind = Token::Number;
      tok_.number = v;
      tok_.text = std::string(start, static_cast<std::size_t>(end - start));
      pos_ += static_cast<size_t>(end - start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = pos_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
        ++j;
      tok_.kind = Token::Ident;
      tok_.text = s_.substr(pos_, j - pos_);
      pos_ = j;
      return;
    }
    tok_.kind = Token::Sym;
    tok_.text = std::string(1, c);
    ++pos_;
  }

  std::string s_;
  size_t pos_ = 0;
  Token tok_;
};

const std::set<std::string> kUnaryFns = {"sin", "cos", "exp", "abs", "floor"};
const std::set<std::string> kBinaryFns = {"min", "max"};

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) {}

  NodePtr parse() {
    NodePtr e = expression(0);
    const Token& t = lex_.peek();
    if (t.kind != Token::End)
      throw ParseError("unexpected token '" + t.text + "'", 1, t.column);
    return e;
  }

 private:
  // precedence climbing: + - (1), * / (2), unary - (3), ^ (4, right assoc)
  NodePtr expression(int min_prec) {
    NodePtr lhs = unary();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind != Token::Sym) break;
      int prec;
      Op op;
      if (t.text == "+") { prec = 1; op = Op::Add; }
      else if (t.text == "-") { prec = 1; op = Op::Sub; }
      else if (t.text == "*") { prec = 2; op = Op::Mul; }
      else if (t.text == "/") { prec = 2; op = Op::Div; }
      else if (t.text == "^") { prec = 4; op = Op::Pow; }
      else break;
      if (prec < min_prec) break;
      lex_.next();
      NodePtr rhs = expression(op == Op::Pow ? prec : prec + 1);
      lhs = make_node(op, {lhs, rhs});
    }
    return lhs;
  }

  NodePtr unary() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Sym && t.text == "-") {
      lex_.next();
      return make_node(Op::Neg, {unary()});
    }
    if (t.kind == Token::Sym && t.text == "+") {
      lex_.next();
      return unary();
    }
    return primary();
  }

  NodePtr primary() {
    Token t = lex_.next();
    if (t.kind == Token::Number) return make_const(t.number);
    if (t.kind == Token::Ident) {
      if (t.text == "pi") return make_const(M_PI);
      if (kUnaryFns.count(t.text) || kBinaryFns.count(t.text)) {
        expect("(");
        std::vector<NodePtr> args;
        args.push_back(expression(0));
        size_t want = kBinaryFns.count(t.text) ? 2 : 1;
        while (lex_.peek().kind == Token::Sym && lex_.peek().text == ",") {
          lex_.next();
          args.push_back(expression(0));
        }
        if (args.size() != want)
          throw ParseError("function '" + t.text + "' expects " +
                               std::to_string(want) + " argument(s)",
                           1, t.column);
        expect(")");
        return make_node(Op::Call, std::move(args), t.text);
      }
      return make_var(t.text);
    }
    if (t.kind == Token::Sym && t.text == "(") {
      NodePtr e = expression(0);
      expect(")");
      return e;
    }
    throw ParseError("unexpected token '" + t.text + "'", 1, t.column);
  }

  void expect(const std::string& sym) {
    Token t = lex_.next();
    if (t.kind != Token::Sym || t.text != sym)
      throw ParseError("expected '" + sym + "', got '" + t.text + "'", 1, t.column);
  }

  Lexer lex_;
};

double eval_node(const Expr::Node& n, const Bindings& b) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: {
      auto it = b.find(n.name);
      if (it == b.end()) throw EvalError("unbound variable '" + n.name + "'");
      return it->second;
    }
    case Op::Neg: return -eval_node(*n.args[0], b);
    case Op::Add: return eval_node(*n.args[0], b) + eval_node(*n.args[1], b);
    case Op::Sub: return eval_node(*n.args[0], b) - eval_node(*n.args[1], b);
    case Op::Mul: return eval_node(*n.args[0], b) * eval_node(*n.args[1], b);
    case Op::Div: {
      double den = eval_node(*n.args[1], b);
      if (den == 0.0) throw EvalError("division by zero");
      return eval_node(*n.args[0], b) / den;
    }
    case Op::Pow: return std::pow(eval_node(*n.args[0], b), eval_node(*n.args[1], b));
    case Op::Call: {
      double a = eval_node(*n.args[0], b);
      if (n.name == "sin") return std::sin(a);
      if (n.name == "cos") return std::cos(a);
      if (n.name == "exp") return std::exp(a);
      if (n.name == "abs") return std::abs(a);
      if (n.name == "floor") return std::floor(a);
      double c = eval_node(*n.args[1], b);
      if (n.name == "min") return std::min(a, c);
      if (n.name == "max") return std::max(a, c);
      throw EvalError("unknown function '" + n.name + "'");
    }
  }
  throw EvalError("corrupt expression tree");
}

void print_node(const Expr::Node& n, std::ostream& os) {
  switch (n.op) {
    case Op::Const: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.value;
      os << tmp.str();
      return;
    }
    case Op::Var: os << n.name; return;
    case Op::Neg:
      os << "(-";
      print_node(*n.args[0], os);
      os << ")";
      return;
    case Op::Call:
      os << n.name << "(";
      print_node(*n.args[0], os);
      if (n.args.size() > 1) {
        os << ", ";
        print_node(*n.args[1], os);
      }
      os << ")";
      return;
    default: {
      const char* sym = n.op == Op::Add   ? " + "
                        : n.op == Op::Sub ? " - "
                        : n.op == Op::Mul ? "*"
                        : n.op == Op::Div ? "/"
                                          : "^";
      os << "(";
      print_node(*n.args[0], os);
      os << sym;
      print_node(*n.args[1], os);
      os << ")";
      return;
    }
  }
}

void collect_vars(const Expr::Node& n, std::set<std::string>& out) {
  if (n.op == Op::Var) out.insert(n.name);
  for (const auto& a : n.args) collect_vars(*a, out);
}

}  // namespace

Expr Expr::parse(const std::string& source) {
  Parser p(source);
  Expr e;
  e.root_ = p.parse();
  return e;
}

Expr Expr::constant(double c) {
  Expr e;
  e.root_ = make_const(c);
  return e;
}

double Expr::eval(const Bindings& b) const {
  if (!root_) throw EvalError("empty expression");
  return eval_node(*root_, b);
}

std::string Expr::str() const {
  if (!root_) return "<empty>";
  std::ostringstream os;
  print_node(*root_, os);
  return os.str();
}

std::vector<std::string> Expr::variables() const {
  std::set<std::string> vars;
  if (root_) collect_vars(*root_, vars);
  return {vars.begin(), vars.end()};
}

double periodicity_defect(const Expr& e, const std::vector<std::string>& periodic_vars,
                          int probes, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  auto all_vars = e.variables();
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    Bindings b;
    for (const auto& v : all_vars) b[v] = unif(rng);
    double base = e.eval(b);
    for (const auto& v : periodic_vars) {
      Bindings shifted = b;
      shifted[v] += 1.0;
      worst = std::max(worst, std::abs(e.eval(shifted) - base));
    }
  }
  return worst;
}

}  // namespace halfcell
