#pragma once

#include <cstdint>
#include <vector>

#include "qt/expr.hpp"

namespace qt {

// Flat instruction program compiled from one or more Expr DAGs. Shared
// subtrees are evaluated once per point; evaluation needs no allocation
// beyond a caller-provided scratch buffer, which makes it the path used
// at quadrature nodes.
class Tape {
  public:
    Tape() = default;
    explicit Tape(const Expr& e) : Tape(std::vector<Expr>{e}) {}
    explicit Tape(const std::vector<Expr>& outputs);

    std::size_t size() const { return code_.size(); }
    std::size_t num_outputs() const { return outputs_.size(); }
    std::size_t scratch_size() const { return nslots_; }

    // Evaluates all outputs at the ambient point p. scratch must hold
    // scratch_size() doubles; out must hold num_outputs() doubles.
    void eval(const double p[5], double* scratch, double* out) const;

    double eval1(const double p[5], std::vector<double>& scratch) const {
        if (scratch.size() < nslots_) scratch.resize(nslots_);
        double out;
        eval(p, scratch.data(), &out);
        return out;
    }

  private:
    enum class Op : std::uint8_t {
        Const, Var, Radius, Neg, Exp, Log, Sqrt, Sin, Cos,
        Add, Sub, Mul, Div, PowInt, PowReal,
    };
    struct Instr {
        Op op;
        std::int32_t dst;
        std::int32_t a = 0;
        std::int32_t b = 0;   // also integer exponent for PowInt
        double c = 0.0;       // constant value or real exponent
    };
    std::vector<Instr> code_;
    std::vector<std::int32_t> outputs_;
    std::size_t nslots_ = 0;
};

// Tape computing [e, d e/dx1 .. d e/dx5] in one pass.
Tape gradient_tape(const Expr& e);

}  // namespace qt
