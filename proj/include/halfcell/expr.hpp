#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace halfcell {

// Arithmetic expression over named variables (x1..xN, y1..yN, p1..pN, ...).
// Immutable after parse; evaluation is pure and total on finite inputs
// (division by zero raises EvalError instead of returning inf).

struct ParseError : std::runtime_error {
  int line, column;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), column(col_) {}
};

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

using Bindings = std::map<std::string, double>;

class Expr {
 public:
  static Expr parse(const std::string& source);
  static Expr constant(double c);

  double eval(const Bindings& b) const;
  std::string str() const;

  // Free variables of the expression, sorted.
  std::vector<std::string> variables() const;

  bool valid() const { return root_ != nullptr; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

// Checks |e(y) - e(y + e_k)| at random probes for every variable named in
// `periodic_vars`; returns the worst deviation. Enforces Z^N-periodicity
// of user-supplied coefficient data.
double periodicity_defect(const Expr& e,
                          const std::vector<std::string>& periodic_vars,
                          int probes = 100, unsigned seed = 12345);

}  // namespace halfcell
