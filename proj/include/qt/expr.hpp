#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

namespace qt {

// Parse/eval error with a byte offset into the source text.
struct SourceError : std::runtime_error {
    SourceError(std::size_t position, const std::string& message)
        : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
          position(position),
          message(message) {}
    std::size_t position;
    std::string message;
};

// Domain violation during evaluation (division by zero, log of a
// nonpositive value, ...). Never reported as a silent NaN.
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& message) : std::runtime_error(message) {}
};

enum class ExprKind {
    Constant,
    Var,     // ambient coordinate x1..x5, axis in [1,5]
    Radius,  // r = (x1^2 + ... + x5^2)^(1/2)
    Neg,
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // rational exponent num/den
};

class Expr;

struct ExprNode {
    ExprKind kind;
    double value = 0.0;           // Constant
    int axis = 0;                 // Var
    long long pow_num = 0;        // Pow exponent numerator
    long long pow_den = 1;        // Pow exponent denominator (> 0)
    std::shared_ptr<const ExprNode> a;  // first child
    std::shared_ptr<const ExprNode> b;  // second child (binary only)
};

// Immutable expression over the ambient coordinates of R^5. Shared
// subtrees stay shared through diff/substitution, so values behave
// like lightweight handles into a DAG.
class Expr {
  public:
    Expr() : node_(constant_node(0.0)) {}
    explicit Expr(double c) : node_(constant_node(c)) {}

    static Expr constant(double c);
    static Expr var(int axis);  // axis in [1,5]
    static Expr radius();
    static Expr pi();

    const ExprNode& node() const { return *node_; }
    const std::shared_ptr<const ExprNode>& ptr() const { return node_; }

    ExprKind kind() const { return node_->kind; }
    bool is_constant() const { return node_->kind == ExprKind::Constant; }
    bool is_constant(double c) const {
        return node_->kind == ExprKind::Constant && node_->value == c;
    }
    double constant_value() const { return node_->value; }

    std::size_t distinct_nodes() const;

    static Expr from_node(std::shared_ptr<const ExprNode> n) {
        Expr e;
        e.node_ = std::move(n);
        return e;
    }

  private:
    static std::shared_ptr<const ExprNode> constant_node(double c);
    std::shared_ptr<const ExprNode> node_;
};

// Smart constructors: constant folding, 0/1 identities, x^0 -> 1, x^1 -> x.
// No further algebraic rewriting.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
inline Expr operator+(const Expr& a, double b) { return a + Expr(b); }
inline Expr operator+(double a, const Expr& b) { return Expr(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr(b); }
inline Expr operator-(double a, const Expr& b) { return Expr(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr(b); }
inline Expr operator*(double a, const Expr& b) { return Expr(a) * b; }
inline Expr operator/(const Expr& a, double b) { return a / Expr(b); }
inline Expr operator/(double a, const Expr& b) { return Expr(a) / b; }

Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr pow(const Expr& a, long long num, long long den = 1);

// Parses the expression grammar:
//   expr := term (('+'|'-') term)*
//   term := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' rational)?
//   atom := number | 'pi' | 'x1'..'x5' | 'r' | func '(' expr ')' | '(' expr ')'
//   func in {exp, log, sqrt, sin, cos}
//   rational := ['-'] integer | '(' ['-'] integer '/' integer ')'
// '^' binds tighter than unary minus. Throws SourceError.
Expr parse(const std::string& src);

// Exact partial derivative in flat R^5; r differentiates as x_axis / r.
Expr diff(const Expr& e, int axis);

// Evaluation at an ambient point. Throws EvalError on domain violations.
double eval(const Expr& e, const double p[5]);

// Substitutes x_i -> x_i / r (and r -> 1), making the result homogeneous
// of degree zero; values on the unit sphere are unchanged.
Expr homogenize0(const Expr& e);

// Substitutes x_i by map[i-1] and r by sqrt(sum of squares of the map).
Expr compose(const Expr& e, const Expr map[5]);

// Substitutes r -> 1; valid as an on-sphere representative.
Expr restrict_to_sphere(const Expr& e);

// Structural equality (same tree shape and payloads).
bool structurally_equal(const Expr& a, const Expr& b);

// Text form that reparses to a structurally equal tree.
std::string to_string(const Expr& e);

}  // namespace qt
