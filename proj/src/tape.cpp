#include "qt/tape.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

namespace qt {

Tape::Tape(const std::vector<Expr>& outputs) {
    std::unordered_map<const ExprNode*, std::int32_t> slot;
    // Post-order emission; iterative to cope with deep derivative chains.
    struct Frame {
        const ExprNode* node;
        bool expanded;
    };
    std::vector<Frame> stack;
    auto emit = [&](const ExprNode* n) -> std::int32_t {
        auto it = slot.find(n);
        if (it != slot.end()) return it->second;
        stack.push_back({n, false});
        while (!stack.empty()) {
            Frame f = stack.back();
            if (slot.count(f.node)) {
                stack.pop_back();
                continue;
            }
            if (!f.expanded) {
                stack.back().expanded = true;
                if (f.node->a && !slot.count(f.node->a.get()))
                    stack.push_back({f.node->a.get(), false});
                if (f.node->b && !slot.count(f.node->b.get()))
                    stack.push_back({f.node->b.get(), false});
                continue;
            }
            stack.pop_back();
            Instr ins;
            ins.dst = static_cast<std::int32_t>(slot.size());
            ins.a = f.node->a ? slot.at(f.node->a.get()) : 0;
            ins.b = f.node->b ? slot.at(f.node->b.get()) : 0;
            switch (f.node->kind) {
                case ExprKind::Constant: ins.op = Op::Const; ins.c = f.node->value; break;
                case ExprKind::Var: ins.op = Op::Var; ins.b = f.node->axis - 1; break;
                case ExprKind::Radius: ins.op = Op::Radius; break;
                case ExprKind::Neg: ins.op = Op::Neg; break;
                case ExprKind::Exp: ins.op = Op::Exp; break;
                case ExprKind::Log: ins.op = Op::Log; break;
                case ExprKind::Sqrt: ins.op = Op::Sqrt; break;
                case ExprKind::Sin: ins.op = Op::Sin; break;
                case ExprKind::Cos: ins.op = Op::Cos; break;
                case ExprKind::Add: ins.op = Op::Add; break;
                case ExprKind::Sub: ins.op = Op::Sub; break;
                case ExprKind::Mul: ins.op = Op::Mul; break;
                case ExprKind::Div: ins.op = Op::Div; break;
                case ExprKind::Pow:
                    if (f.node->pow_den == 1 && std::abs(f.node->pow_num) <= 16) {
                        ins.op = Op::PowInt;
                        ins.b = static_cast<std::int32_t>(f.node->pow_num);
                    } else {
                        ins.op = Op::PowReal;
                        ins.c = static_cast<double>(f.node->pow_num) /
                                static_cast<double>(f.node->pow_den);
                        ins.b = f.node->pow_den == 1 ? 1 : 0;  // 1: integer exponent, no sign limit
                    }
                    break;
            }
            slot.emplace(f.node, ins.dst);
            code_.push_back(ins);
        }
        return slot.at(n);
    };
    for (const Expr& e : outputs) outputs_.push_back(emit(&e.node()));
    nslots_ = slot.size();
}

void Tape::eval(const double p[5], double* s, double* out) const {
    for (const Instr& ins : code_) {
        double v;
        switch (ins.op) {
            case Op::Const: v = ins.c; break;
            case Op::Var: v = p[ins.b]; break;
            case Op::Radius:
                v = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3] +
                              p[4] * p[4]);
                break;
            case Op::Neg: v = -s[ins.a]; break;
            case Op::Exp: v = std::exp(s[ins.a]); break;
            case Op::Log: {
                double u = s[ins.a];
                if (u <= 0.0) throw EvalError("log of nonpositive value " + std::to_string(u));
                v = std::log(u);
                break;
            }
            case Op::Sqrt: {
                double u = s[ins.a];
                if (u < 0.0) throw EvalError("sqrt of negative value " + std::to_string(u));
                v = std::sqrt(u);
                break;
            }
            case Op::Sin: v = std::sin(s[ins.a]); break;
            case Op::Cos: v = std::cos(s[ins.a]); break;
            case Op::Add: v = s[ins.a] + s[ins.b]; break;
            case Op::Sub: v = s[ins.a] - s[ins.b]; break;
            case Op::Mul: v = s[ins.a] * s[ins.b]; break;
            case Op::Div: {
                double den = s[ins.b];
                if (den == 0.0) throw EvalError("division by zero");
                v = s[ins.a] / den;
                break;
            }
            case Op::PowInt: {
                double b = s[ins.a];
                int n = ins.b < 0 ? -ins.b : ins.b;
                if (b == 0.0 && ins.b < 0) throw EvalError("zero base with negative exponent");
                double r = 1.0;
                double m = b;
                while (n > 0) {
                    if (n & 1) r *= m;
                    m *= m;
                    n >>= 1;
                }
                v = ins.b < 0 ? 1.0 / r : r;
                break;
            }
            case Op::PowReal: {
                double b = s[ins.a];
                if (ins.b == 0 && b < 0.0)
                    throw EvalError("fractional power of negative base");
                if (b == 0.0 && ins.c < 0.0)
                    throw EvalError("zero base with negative exponent");
                v = std::pow(b, ins.c);
                break;
            }
            default: v = 0.0; break;
        }
        s[ins.dst] = v;
    }
    for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = s[outputs_[k]];
}

Tape gradient_tape(const Expr& e) {
    std::vector<Expr> outs{e};
    for (int i = 1; i <= 5; ++i) outs.push_back(diff(e, i));
    return Tape(outs);
}

}  // namespace qt
