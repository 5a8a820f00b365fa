#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reldiff/common.hpp"

namespace reldiff {

/// Arithmetic expression in the single variable r, compiled to a stack
/// program. Grammar: + - * / ^ (right-associative), unary minus, sqrt(e),
/// exp(e), parentheses, decimal/scientific literals.
class Expression {
public:
    static Expression parse(const std::string& text);

    double operator()(double r) const;
    const std::string& text() const { return text_; }

private:
    enum class Op : std::uint8_t {
        push_const,
        push_r,
        add,
        sub,
        mul,
        div,
        pow,
        neg,
        sqrt_fn,
        exp_fn,
    };
    struct Instr {
        Op op;
        double value;
    };
    std::vector<Instr> prog_;
    std::string text_;
};

}  // namespace reldiff
