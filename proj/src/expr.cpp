#include "qt/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace qt {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

bool is_const(const Expr& e) { return e.kind() == ExprKind::Constant; }

Expr make_unary(ExprKind k, const Expr& a) {
    ExprNode n;
    n.kind = k;
    n.a = a.ptr();
    return Expr::from_node(make_node(std::move(n)));
}

Expr make_binary(ExprKind k, const Expr& a, const Expr& b) {
    ExprNode n;
    n.kind = k;
    n.a = a.ptr();
    n.b = b.ptr();
    return Expr::from_node(make_node(std::move(n)));
}

}  // namespace

std::shared_ptr<const ExprNode> Expr::constant_node(double c) {
    ExprNode n;
    n.kind = ExprKind::Constant;
    n.value = c;
    return make_node(std::move(n));
}

Expr Expr::constant(double c) { return Expr(c); }

Expr Expr::var(int axis) {
    if (axis < 1 || axis > 5) throw std::invalid_argument("variable axis must be in [1,5]");
    ExprNode n;
    n.kind = ExprKind::Var;
    n.axis = axis;
    return from_node(make_node(std::move(n)));
}

Expr Expr::radius() {
    ExprNode n;
    n.kind = ExprKind::Radius;
    return from_node(make_node(std::move(n)));
}

Expr Expr::pi() { return Expr(std::numbers::pi); }

std::size_t Expr::distinct_nodes() const {
    std::unordered_map<const ExprNode*, bool> seen;
    std::vector<const ExprNode*> stack{node_.get()};
    while (!stack.empty()) {
        const ExprNode* n = stack.back();
        stack.pop_back();
        if (!n || seen.count(n)) continue;
        seen[n] = true;
        stack.push_back(n->a.get());
        stack.push_back(n->b.get());
    }
    return seen.size();
}

Expr operator+(const Expr& a, const Expr& b) {
    if (is_const(a) && is_const(b)) return Expr(a.constant_value() + b.constant_value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return make_binary(ExprKind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (is_const(a) && is_const(b)) return Expr(a.constant_value() - b.constant_value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return make_binary(ExprKind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (is_const(a) && is_const(b)) return Expr(a.constant_value() * b.constant_value());
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    return make_binary(ExprKind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (is_const(b) && b.constant_value() == 0.0) throw EvalError("division by constant zero");
    if (is_const(a) && is_const(b)) return Expr(a.constant_value() / b.constant_value());
    if (a.is_constant(0.0)) return Expr(0.0);
    if (b.is_constant(1.0)) return a;
    return make_binary(ExprKind::Div, a, b);
}

Expr operator-(const Expr& a) {
    if (is_const(a)) return Expr(-a.constant_value());
    if (a.kind() == ExprKind::Neg) return Expr::from_node(a.node().a);
    return make_unary(ExprKind::Neg, a);
}

Expr exp(const Expr& a) {
    if (is_const(a)) return Expr(std::exp(a.constant_value()));
    return make_unary(ExprKind::Exp, a);
}

Expr log(const Expr& a) {
    if (is_const(a)) {
        if (a.constant_value() <= 0.0) throw EvalError("log of nonpositive constant");
        return Expr(std::log(a.constant_value()));
    }
    return make_unary(ExprKind::Log, a);
}

Expr sqrt(const Expr& a) {
    if (is_const(a)) {
        if (a.constant_value() < 0.0) throw EvalError("sqrt of negative constant");
        return Expr(std::sqrt(a.constant_value()));
    }
    return make_unary(ExprKind::Sqrt, a);
}

Expr sin(const Expr& a) {
    if (is_const(a)) return Expr(std::sin(a.constant_value()));
    return make_unary(ExprKind::Sin, a);
}

Expr cos(const Expr& a) {
    if (is_const(a)) return Expr(std::cos(a.constant_value()));
    return make_unary(ExprKind::Cos, a);
}

namespace {

double pow_rational(double base, long long num, long long den, const char* what) {
    if (den == 1) {
        if (base == 0.0 && num < 0) throw EvalError(std::string("zero base with negative exponent in ") + what);
        double r = 1.0;
        double b = base;
        long long n = num < 0 ? -num : num;
        while (n > 0) {
            if (n & 1) r *= b;
            b *= b;
            n >>= 1;
        }
        return num < 0 ? 1.0 / r : r;
    }
    if (base < 0.0) throw EvalError(std::string("fractional power of negative base in ") + what);
    if (base == 0.0 && num < 0) throw EvalError(std::string("zero base with negative exponent in ") + what);
    return std::pow(base, static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace

Expr pow(const Expr& a, long long num, long long den) {
    if (den == 0) throw std::invalid_argument("pow exponent with zero denominator");
    if (den < 0) {
        den = -den;
        num = -num;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0) return Expr(1.0);
    if (num == 1 && den == 1) return a;
    if (is_const(a)) return Expr(pow_rational(a.constant_value(), num, den, "constant fold"));
    ExprNode n;
    n.kind = ExprKind::Pow;
    n.pow_num = num;
    n.pow_den = den;
    n.a = a.ptr();
    return Expr::from_node(make_node(std::move(n)));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
    const std::string& src;
    std::size_t pos = 0;

    explicit Parser(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= src.size();
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    bool accept(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw SourceError(pos, std::string("expected '") + c + "' " + what);
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept('+')) {
                e = e + parse_term();
            } else if (accept('-')) {
                e = e - parse_term();
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (accept('*')) {
                e = e * parse_factor();
            } else if (accept('/')) {
                e = e / parse_factor();
            } else {
                return e;
            }
        }
    }

    // '^' binds tighter than unary minus: -x1^2 parses as -(x1^2).
    Expr parse_factor() {
        if (accept('-')) return -parse_factor();
        Expr base = parse_atom();
        if (accept('^')) {
            auto [num, den] = parse_rational();
            return pow(base, num, den);
        }
        return base;
    }

    std::pair<long long, long long> parse_rational() {
        skip_ws();
        if (accept('(')) {
            long long num = parse_integer();
            long long den = 1;
            if (accept('/')) den = parse_integer();
            expect(')', "closing rational exponent");
            if (den == 0) throw SourceError(pos, "zero denominator in exponent");
            return {num, den};
        }
        return {parse_integer(), 1};
    }

    long long parse_integer() {
        skip_ws();
        std::size_t start = pos;
        bool neg = false;
        if (pos < src.size() && (src[pos] == '-' || src[pos] == '+')) {
            neg = src[pos] == '-';
            ++pos;
        }
        if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
            throw SourceError(start, "expected integer");
        long long v = 0;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
            v = v * 10 + (src[pos] - '0');
            ++pos;
        }
        return neg ? -v : v;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos >= src.size()) throw SourceError(pos, "unexpected end of input");
        char c = src[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos;
            Expr e = parse_expr();
            expect(')', "closing parenthesis");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        throw SourceError(pos, std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        std::size_t start = pos;
        while (pos < src.size() && (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.')) ++pos;
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
            if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            } else {
                pos = mark;  // 'e' was not an exponent
            }
        }
        try {
            return Expr(std::stod(src.substr(start, pos - start)));
        } catch (const std::exception&) {
            throw SourceError(start, "malformed number");
        }
    }

    Expr parse_identifier() {
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        std::string name = src.substr(start, pos - start);
        if (name == "pi") return Expr::pi();
        if (name == "r") return Expr::radius();
        if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '5')
            return Expr::var(name[1] - '0');
        if (name == "exp" || name == "log" || name == "sqrt" || name == "sin" || name == "cos") {
            expect('(', "after function name");
            Expr arg = parse_expr();
            expect(')', "closing function call");
            if (name == "exp") return exp(arg);
            if (name == "log") return log(arg);
            if (name == "sqrt") return sqrt(arg);
            if (name == "sin") return sin(arg);
            return cos(arg);
        }
        throw SourceError(start, "unknown identifier '" + name + "'");
    }
};

}  // namespace

Expr parse(const std::string& src) {
    Parser p(src);
    if (p.eof()) throw SourceError(0, "empty input");
    Expr e = p.parse_expr();
    if (!p.eof()) throw SourceError(p.pos, "trailing input");
    return e;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

struct DiffCache {
    int axis;
    std::unordered_map<const ExprNode*, Expr> memo;
};

Expr diff_impl(const Expr& e, DiffCache& c) {
    auto it = c.memo.find(&e.node());
    if (it != c.memo.end()) return it->second;

    const ExprNode& n = e.node();
    Expr a = n.a ? Expr::from_node(n.a) : Expr();
    Expr b = n.b ? Expr::from_node(n.b) : Expr();
    Expr d;
    switch (n.kind) {
        case ExprKind::Constant:
            d = Expr(0.0);
            break;
        case ExprKind::Var:
            d = Expr(n.axis == c.axis ? 1.0 : 0.0);
            break;
        case ExprKind::Radius:
            d = Expr::var(c.axis) / Expr::radius();
            break;
        case ExprKind::Neg:
            d = -diff_impl(a, c);
            break;
        case ExprKind::Exp:
            d = e * diff_impl(a, c);
            break;
        case ExprKind::Log:
            d = diff_impl(a, c) / a;
            break;
        case ExprKind::Sqrt:
            d = diff_impl(a, c) / (Expr(2.0) * e);
            break;
        case ExprKind::Sin:
            d = cos(a) * diff_impl(a, c);
            break;
        case ExprKind::Cos:
            d = -(sin(a) * diff_impl(a, c));
            break;
        case ExprKind::Add:
            d = diff_impl(a, c) + diff_impl(b, c);
            break;
        case ExprKind::Sub:
            d = diff_impl(a, c) - diff_impl(b, c);
            break;
        case ExprKind::Mul:
            d = diff_impl(a, c) * b + a * diff_impl(b, c);
            break;
        case ExprKind::Div:
            d = diff_impl(a, c) / b - (a * diff_impl(b, c)) / (b * b);
            break;
        case ExprKind::Pow: {
            // d(u^q) = q * u^(q-1) * u'
            Expr q = Expr(static_cast<double>(n.pow_num) / static_cast<double>(n.pow_den));
            Expr um1 = pow(a, n.pow_num - n.pow_den, n.pow_den);
            d = q * um1 * diff_impl(a, c);
            break;
        }
    }
    c.memo.emplace(&e.node(), d);
    return d;
}

}  // namespace

Expr diff(const Expr& e, int axis) {
    if (axis < 1 || axis > 5) throw std::invalid_argument("diff axis must be in [1,5]");
    DiffCache c{axis, {}};
    return diff_impl(e, c);
}

// ---------------------------------------------------------------------------
// Evaluation (one-off path; hot loops use qt::Tape)

namespace {

double eval_impl(const ExprNode* n, const double p[5],
                 std::unordered_map<const ExprNode*, double>& memo) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    double v = 0.0;
    switch (n->kind) {
        case ExprKind::Constant:
            v = n->value;
            break;
        case ExprKind::Var:
            v = p[n->axis - 1];
            break;
        case ExprKind::Radius:
            v = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3] + p[4] * p[4]);
            break;
        case ExprKind::Neg:
            v = -eval_impl(n->a.get(), p, memo);
            break;
        case ExprKind::Exp:
            v = std::exp(eval_impl(n->a.get(), p, memo));
            break;
        case ExprKind::Log: {
            double u = eval_impl(n->a.get(), p, memo);
            if (u <= 0.0) throw EvalError("log of nonpositive value " + std::to_string(u));
            v = std::log(u);
            break;
        }
        case ExprKind::Sqrt: {
            double u = eval_impl(n->a.get(), p, memo);
            if (u < 0.0) throw EvalError("sqrt of negative value " + std::to_string(u));
            v = std::sqrt(u);
            break;
        }
        case ExprKind::Sin:
            v = std::sin(eval_impl(n->a.get(), p, memo));
            break;
        case ExprKind::Cos:
            v = std::cos(eval_impl(n->a.get(), p, memo));
            break;
        case ExprKind::Add:
            v = eval_impl(n->a.get(), p, memo) + eval_impl(n->b.get(), p, memo);
            break;
        case ExprKind::Sub:
            v = eval_impl(n->a.get(), p, memo) - eval_impl(n->b.get(), p, memo);
            break;
        case ExprKind::Mul:
            v = eval_impl(n->a.get(), p, memo) * eval_impl(n->b.get(), p, memo);
            break;
        case ExprKind::Div: {
            double den = eval_impl(n->b.get(), p, memo);
            if (den == 0.0) throw EvalError("division by zero");
            v = eval_impl(n->a.get(), p, memo) / den;
            break;
        }
        case ExprKind::Pow:
            v = pow_rational(eval_impl(n->a.get(), p, memo), n->pow_num, n->pow_den, "pow");
            break;
    }
    if (!std::isfinite(v)) throw EvalError("non-finite value in evaluation");
    memo.emplace(n, v);
    return v;
}

}  // namespace

double eval(const Expr& e, const double p[5]) {
    std::unordered_map<const ExprNode*, double> memo;
    return eval_impl(&e.node(), p, memo);
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

// Rebuilds e with variables and r replaced; memoized so shared subtrees
// stay shared.
Expr substitute(const Expr& e, const Expr vars[5], const Expr& radius,
                std::unordered_map<const ExprNode*, Expr>& memo) {
    auto it = memo.find(&e.node());
    if (it != memo.end()) return it->second;
    const ExprNode& n = e.node();
    Expr out;
    switch (n.kind) {
        case ExprKind::Constant:
            out = e;
            break;
        case ExprKind::Var:
            out = vars[n.axis - 1];
            break;
        case ExprKind::Radius:
            out = radius;
            break;
        default: {
            Expr a = substitute(Expr::from_node(n.a), vars, radius, memo);
            if (n.kind == ExprKind::Pow) {
                out = pow(a, n.pow_num, n.pow_den);
            } else if (!n.b) {
                switch (n.kind) {
                    case ExprKind::Neg: out = -a; break;
                    case ExprKind::Exp: out = exp(a); break;
                    case ExprKind::Log: out = log(a); break;
                    case ExprKind::Sqrt: out = sqrt(a); break;
                    case ExprKind::Sin: out = sin(a); break;
                    default: out = cos(a); break;
                }
            } else {
                Expr b = substitute(Expr::from_node(n.b), vars, radius, memo);
                switch (n.kind) {
                    case ExprKind::Add: out = a + b; break;
                    case ExprKind::Sub: out = a - b; break;
                    case ExprKind::Mul: out = a * b; break;
                    default: out = a / b; break;
                }
            }
        }
    }
    memo.emplace(&e.node(), out);
    return out;
}

}  // namespace

Expr homogenize0(const Expr& e) {
    Expr r = Expr::radius();
    Expr vars[5];
    for (int i = 0; i < 5; ++i) vars[i] = Expr::var(i + 1) / r;
    std::unordered_map<const ExprNode*, Expr> memo;
    return substitute(e, vars, Expr(1.0), memo);
}

Expr compose(const Expr& e, const Expr map[5]) {
    Expr sumsq = map[0] * map[0];
    for (int i = 1; i < 5; ++i) sumsq = sumsq + map[i] * map[i];
    std::unordered_map<const ExprNode*, Expr> memo;
    return substitute(e, map, sqrt(sumsq), memo);
}

Expr restrict_to_sphere(const Expr& e) {
    Expr vars[5];
    for (int i = 0; i < 5; ++i) vars[i] = Expr::var(i + 1);
    std::unordered_map<const ExprNode*, Expr> memo;
    return substitute(e, vars, Expr(1.0), memo);
}

// ---------------------------------------------------------------------------
// Structural equality and printing

bool structurally_equal(const Expr& ea, const Expr& eb) {
    const ExprNode& a = ea.node();
    const ExprNode& b = eb.node();
    if (&a == &b) return true;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Constant:
            return a.value == b.value;
        case ExprKind::Var:
            return a.axis == b.axis;
        case ExprKind::Radius:
            return true;
        case ExprKind::Pow:
            if (a.pow_num != b.pow_num || a.pow_den != b.pow_den) return false;
            return structurally_equal(Expr::from_node(a.a), Expr::from_node(b.a));
        default:
            if (!structurally_equal(Expr::from_node(a.a), Expr::from_node(b.a))) return false;
            if (!a.b != !b.b) return false;
            if (!a.b) return true;
            return structurally_equal(Expr::from_node(a.b), Expr::from_node(b.b));
    }
}

namespace {

void print_number(std::ostream& os, double v) {
    if (v < 0) {
        // keep the literal nonnegative; the '-' is emitted by the caller
        os << "(0 - ";
        print_number(os, -v);
        os << ")";
        return;
    }
    std::ostringstream tmp;
    tmp.precision(17);
    tmp << v;
    os << tmp.str();
}

void print_impl(std::ostream& os, const ExprNode& n) {
    switch (n.kind) {
        case ExprKind::Constant:
            print_number(os, n.value);
            return;
        case ExprKind::Var:
            os << "x" << n.axis;
            return;
        case ExprKind::Radius:
            os << "r";
            return;
        case ExprKind::Neg:
            os << "(-";
            print_impl(os, *n.a);
            os << ")";
            return;
        case ExprKind::Exp:
        case ExprKind::Log:
        case ExprKind::Sqrt:
        case ExprKind::Sin:
        case ExprKind::Cos: {
            const char* name = n.kind == ExprKind::Exp    ? "exp"
                               : n.kind == ExprKind::Log  ? "log"
                               : n.kind == ExprKind::Sqrt ? "sqrt"
                               : n.kind == ExprKind::Sin  ? "sin"
                                                          : "cos";
            os << name << "(";
            print_impl(os, *n.a);
            os << ")";
            return;
        }
        case ExprKind::Pow:
            os << "(";
            print_impl(os, *n.a);
            if (n.pow_den == 1) {
                os << ")^" << n.pow_num;
            } else {
                os << ")^(" << n.pow_num << "/" << n.pow_den << ")";
            }
            return;
        default: {
            const char* op = n.kind == ExprKind::Add   ? " + "
                             : n.kind == ExprKind::Sub ? " - "
                             : n.kind == ExprKind::Mul ? "*"
                                                       : "/";
            os << "(";
            print_impl(os, *n.a);
            os << op;
            print_impl(os, *n.b);
            os << ")";
            return;
        }
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print_impl(os, e.node());
    return os.str();
}

}  // namespace qt
