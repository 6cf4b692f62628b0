#pragma once

#include <cstdint>
#include <string>

namespace warpsim {

// Scalar carried by lane registers: a 64-bit integer or a 64-bit float.
// Arithmetic on two integers stays integral (division truncates); anything
// touching a real promotes to double. Comparisons and logic yield int 0/1.
enum class ValueType { Int, Real };

struct Value {
    ValueType type = ValueType::Int;
    std::int64_t i = 0;
    double r = 0.0;

    static Value integer(std::int64_t v) { return Value{ValueType::Int, v, 0.0}; }
    static Value real(double v) { return Value{ValueType::Real, 0, v}; }

    bool is_int() const { return type == ValueType::Int; }
    double as_real() const { return is_int() ? static_cast<double>(i) : r; }
    bool truthy() const { return is_int() ? i != 0 : r != 0.0; }

    bool bit_equal(const Value& o) const;
    std::string str() const;
};

enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnOp { Neg, Log, Floor };

// Faults (division by zero, log of a non-positive value, floor overflow)
// throw FaultError; `where` is prepended to the diagnostic.
Value apply_bin(BinOp op, const Value& a, const Value& b, const char* where);
Value apply_un(UnOp op, const Value& a, const char* where);

const char* bin_op_name(BinOp op);
const char* un_op_name(UnOp op);

}  // namespace warpsim
