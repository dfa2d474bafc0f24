#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pflow {

// Closed-form scalar expressions over chart coordinates and named
// parameters, with exact symbolic partial derivatives. This is the small
// DSL every field/form coefficient is written in:
//
//   arithmetic:  + - * / ^        functions:  sin cos exp sqrt log pow atan2
//   coordinates: named on parse (x y z | x1 x2 x3 x4 | u v)
//   parameters:  any other identifier; "pi" is the builtin constant
//
// Trees are immutable and shared; smart constructors do light constant
// folding so derivative trees stay manageable.

enum class UnOp { Neg, Sin, Cos, Exp, Sqrt, Log };
enum class BinOp { Add, Sub, Mul, Div, Pow, Atan2 };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;
using ParamMap = std::map<std::string, double>;

class Expr {
public:
    enum class Kind { Const, Coord, Param, Unary, Binary };

    Kind kind;
    double value = 0.0;    // Const
    int coord = -1;        // Coord: index into the chart coordinate list
    std::string param;     // Param
    UnOp un = UnOp::Neg;
    BinOp bin = BinOp::Add;
    ExprPtr a, b;

    double eval(std::span<const double> coords, const ParamMap* params = nullptr) const;
};

ExprPtr constant(double v);
ExprPtr coord(int index);
ExprPtr param(const std::string& name);

ExprPtr neg(ExprPtr x);
ExprPtr sin_e(ExprPtr x);
ExprPtr cos_e(ExprPtr x);
ExprPtr exp_e(ExprPtr x);
ExprPtr sqrt_e(ExprPtr x);
ExprPtr log_e(ExprPtr x);

ExprPtr add(ExprPtr lhs, ExprPtr rhs);
ExprPtr sub(ExprPtr lhs, ExprPtr rhs);
ExprPtr mul(ExprPtr lhs, ExprPtr rhs);
ExprPtr div(ExprPtr lhs, ExprPtr rhs);
ExprPtr pow_e(ExprPtr base, ExprPtr exponent);
ExprPtr atan2_e(ExprPtr y, ExprPtr x);

/// Exact partial derivative with respect to coordinate `index`.
ExprPtr diff(const ExprPtr& e, int index);

/// Replace every Param node by a Const from `params`. Throws UnknownParam
/// for parameters not present.
ExprPtr bind_params(const ExprPtr& e, const ParamMap& params);

/// Structural equality (same tree shape and leaves).
bool same(const ExprPtr& lhs, const ExprPtr& rhs);

bool is_const(const ExprPtr& e, double v);
inline bool is_zero(const ExprPtr& e) { return is_const(e, 0.0); }

/// True if the expression references any coordinate or parameter.
bool depends_on_coord(const ExprPtr& e, int index);

/// Canonical text form: parse(to_string(e)) == e structurally.
std::string to_string(const ExprPtr& e, const std::vector<std::string>& coord_names);

/// Recursive-descent parser. Identifiers matching `coord_names` become
/// coordinates, "pi" the constant, anything else a named parameter.
ExprPtr parse(const std::string& text, const std::vector<std::string>& coord_names);

} // namespace pflow
