#include "planeflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "planeflow/errors.hpp"

namespace pflow {

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

bool is_constant(const ExprPtr& e) { return e->kind == Expr::Kind::Const; }

} // namespace

double Expr::eval(std::span<const double> coords, const ParamMap* params) const {
    switch (kind) {
    case Kind::Const:
        return value;
    case Kind::Coord:
        if (coord < 0 || coord >= static_cast<int>(coords.size()))
            throw DomainError("coordinate index out of range in expression evaluation");
        return coords[coord];
    case Kind::Param: {
        if (!params)
            throw UnknownParam("unbound parameter '" + param + "'");
        auto it = params->find(param);
        if (it == params->end())
            throw UnknownParam("unbound parameter '" + param + "'");
        return it->second;
    }
    case Kind::Unary: {
        double x = a->eval(coords, params);
        switch (un) {
        case UnOp::Neg: return -x;
        case UnOp::Sin: return std::sin(x);
        case UnOp::Cos: return std::cos(x);
        case UnOp::Exp: return std::exp(x);
        case UnOp::Sqrt: return std::sqrt(x);
        case UnOp::Log: return std::log(x);
        }
        break;
    }
    case Kind::Binary: {
        double x = a->eval(coords, params);
        double y = b->eval(coords, params);
        switch (bin) {
        case BinOp::Add: return x + y;
        case BinOp::Sub: return x - y;
        case BinOp::Mul: return x * y;
        case BinOp::Div: return x / y;
        case BinOp::Pow: return std::pow(x, y);
        case BinOp::Atan2: return std::atan2(x, y);
        }
        break;
    }
    }
    throw DomainError("corrupt expression node");
}

ExprPtr constant(double v) {
    Expr e;
    e.kind = Expr::Kind::Const;
    e.value = v;
    return make(std::move(e));
}

ExprPtr coord(int index) {
    Expr e;
    e.kind = Expr::Kind::Coord;
    e.coord = index;
    return make(std::move(e));
}

ExprPtr param(const std::string& name) {
    Expr e;
    e.kind = Expr::Kind::Param;
    e.param = name;
    return make(std::move(e));
}

bool is_const(const ExprPtr& e, double v) {
    return e && e->kind == Expr::Kind::Const && e->value == v;
}

namespace {

ExprPtr unary(UnOp op, ExprPtr x) {
    if (is_constant(x)) {
        double v = x->value;
        switch (op) {
        case UnOp::Neg: return constant(-v);
        case UnOp::Sin: return constant(std::sin(v));
        case UnOp::Cos: return constant(std::cos(v));
        case UnOp::Exp: return constant(std::exp(v));
        case UnOp::Sqrt: return constant(std::sqrt(v));
        case UnOp::Log: return constant(std::log(v));
        }
    }
    Expr e;
    e.kind = Expr::Kind::Unary;
    e.un = op;
    e.a = std::move(x);
    return make(std::move(e));
}

ExprPtr binary(BinOp op, ExprPtr x, ExprPtr y) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.bin = op;
    e.a = std::move(x);
    e.b = std::move(y);
    return make(std::move(e));
}

bool is_neg(const ExprPtr& e) {
    return e->kind == Expr::Kind::Unary && e->un == UnOp::Neg;
}

} // namespace

ExprPtr neg(ExprPtr x) {
    if (is_neg(x)) return x->a;
    return unary(UnOp::Neg, std::move(x));
}

ExprPtr sin_e(ExprPtr x) { return unary(UnOp::Sin, std::move(x)); }
ExprPtr cos_e(ExprPtr x) { return unary(UnOp::Cos, std::move(x)); }
ExprPtr exp_e(ExprPtr x) { return unary(UnOp::Exp, std::move(x)); }
ExprPtr sqrt_e(ExprPtr x) { return unary(UnOp::Sqrt, std::move(x)); }
ExprPtr log_e(ExprPtr x) { return unary(UnOp::Log, std::move(x)); }

ExprPtr add(ExprPtr lhs, ExprPtr rhs) {
    if (is_zero(lhs)) return rhs;
    if (is_zero(rhs)) return lhs;
    if (is_constant(lhs) && is_constant(rhs)) return constant(lhs->value + rhs->value);
    if (is_neg(rhs) && same(lhs, rhs->a)) return constant(0.0);
    if (is_neg(lhs) && same(lhs->a, rhs)) return constant(0.0);
    return binary(BinOp::Add, std::move(lhs), std::move(rhs));
}

ExprPtr sub(ExprPtr lhs, ExprPtr rhs) {
    if (is_zero(rhs)) return lhs;
    if (is_zero(lhs)) return neg(std::move(rhs));
    if (is_constant(lhs) && is_constant(rhs)) return constant(lhs->value - rhs->value);
    if (same(lhs, rhs)) return constant(0.0);
    return binary(BinOp::Sub, std::move(lhs), std::move(rhs));
}

ExprPtr mul(ExprPtr lhs, ExprPtr rhs) {
    if (is_zero(lhs) || is_zero(rhs)) return constant(0.0);
    if (is_const(lhs, 1.0)) return rhs;
    if (is_const(rhs, 1.0)) return lhs;
    if (is_const(lhs, -1.0)) return neg(std::move(rhs));
    if (is_const(rhs, -1.0)) return neg(std::move(lhs));
    if (is_constant(lhs) && is_constant(rhs)) return constant(lhs->value * rhs->value);
    return binary(BinOp::Mul, std::move(lhs), std::move(rhs));
}

ExprPtr div(ExprPtr lhs, ExprPtr rhs) {
    if (is_zero(lhs)) return constant(0.0);
    if (is_const(rhs, 1.0)) return lhs;
    if (is_constant(lhs) && is_constant(rhs) && rhs->value != 0.0)
        return constant(lhs->value / rhs->value);
    return binary(BinOp::Div, std::move(lhs), std::move(rhs));
}

ExprPtr pow_e(ExprPtr base, ExprPtr exponent) {
    if (is_zero(exponent)) return constant(1.0);
    if (is_const(exponent, 1.0)) return base;
    if (is_constant(base) && is_constant(exponent))
        return constant(std::pow(base->value, exponent->value));
    return binary(BinOp::Pow, std::move(base), std::move(exponent));
}

ExprPtr atan2_e(ExprPtr y, ExprPtr x) {
    return binary(BinOp::Atan2, std::move(y), std::move(x));
}

ExprPtr diff(const ExprPtr& e, int index) {
    switch (e->kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Param:
        return constant(0.0);
    case Expr::Kind::Coord:
        return constant(e->coord == index ? 1.0 : 0.0);
    case Expr::Kind::Unary: {
        ExprPtr da = diff(e->a, index);
        switch (e->un) {
        case UnOp::Neg: return neg(da);
        case UnOp::Sin: return mul(cos_e(e->a), da);
        case UnOp::Cos: return neg(mul(sin_e(e->a), da));
        case UnOp::Exp: return mul(exp_e(e->a), da);
        case UnOp::Sqrt: return div(da, mul(constant(2.0), sqrt_e(e->a)));
        case UnOp::Log: return div(da, e->a);
        }
        break;
    }
    case Expr::Kind::Binary: {
        ExprPtr da = diff(e->a, index);
        ExprPtr db = diff(e->b, index);
        switch (e->bin) {
        case BinOp::Add: return add(da, db);
        case BinOp::Sub: return sub(da, db);
        case BinOp::Mul: return add(mul(da, e->b), mul(e->a, db));
        case BinOp::Div:
            return div(sub(mul(da, e->b), mul(e->a, db)), mul(e->b, e->b));
        case BinOp::Pow:
            if (is_constant(e->b)) {
                // d(u^c) = c * u^(c-1) * u'
                return mul(mul(e->b, pow_e(e->a, constant(e->b->value - 1.0))), da);
            }
            // d(u^v) = u^v * (v' log u + v u'/u)
            return mul(pow_e(e->a, e->b),
                       add(mul(db, log_e(e->a)), mul(e->b, div(da, e->a))));
        case BinOp::Atan2:
            // d atan2(u, v) = (u'v - u v') / (u^2 + v^2)
            return div(sub(mul(da, e->b), mul(e->a, db)),
                       add(mul(e->a, e->a), mul(e->b, e->b)));
        }
        break;
    }
    }
    throw DomainError("corrupt expression node in diff");
}

ExprPtr bind_params(const ExprPtr& e, const ParamMap& params) {
    switch (e->kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Coord:
        return e;
    case Expr::Kind::Param: {
        auto it = params.find(e->param);
        if (it == params.end())
            throw UnknownParam("unbound parameter '" + e->param + "'");
        return constant(it->second);
    }
    case Expr::Kind::Unary:
        return unary(e->un, bind_params(e->a, params));
    case Expr::Kind::Binary:
        return binary(e->bin, bind_params(e->a, params), bind_params(e->b, params));
    }
    throw DomainError("corrupt expression node in bind_params");
}

bool same(const ExprPtr& lhs, const ExprPtr& rhs) {
    if (lhs == rhs) return true;
    if (!lhs || !rhs) return false;
    if (lhs->kind != rhs->kind) return false;
    switch (lhs->kind) {
    case Expr::Kind::Const: return lhs->value == rhs->value;
    case Expr::Kind::Coord: return lhs->coord == rhs->coord;
    case Expr::Kind::Param: return lhs->param == rhs->param;
    case Expr::Kind::Unary: return lhs->un == rhs->un && same(lhs->a, rhs->a);
    case Expr::Kind::Binary:
        return lhs->bin == rhs->bin && same(lhs->a, rhs->a) && same(lhs->b, rhs->b);
    }
    return false;
}

bool depends_on_coord(const ExprPtr& e, int index) {
    switch (e->kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Param:
        return false;
    case Expr::Kind::Coord:
        return e->coord == index;
    case Expr::Kind::Unary:
        return depends_on_coord(e->a, index);
    case Expr::Kind::Binary:
        return depends_on_coord(e->a, index) || depends_on_coord(e->b, index);
    }
    return false;
}

// ---------------------------------------------------------------------------
// printing

namespace {

// precedence: additive 1, multiplicative 2, unary 3, power 4, atom 5
int precedence(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return e.value < 0 ? 3 : 5;
    case Expr::Kind::Coord:
    case Expr::Kind::Param:
        return 5;
    case Expr::Kind::Unary:
        return e.un == UnOp::Neg ? 3 : 5;
    case Expr::Kind::Binary:
        switch (e.bin) {
        case BinOp::Add:
        case BinOp::Sub: return 1;
        case BinOp::Mul:
        case BinOp::Div: return 2;
        case BinOp::Pow: return 4;
        case BinOp::Atan2: return 5;
        }
    }
    return 5;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const Expr& e, const std::vector<std::string>& names, std::ostringstream& out,
           int parent_prec, bool right_side) {
    int prec = precedence(e);
    bool parens = prec < parent_prec || (prec == parent_prec && right_side && prec != 5);
    if (parens) out << '(';
    switch (e.kind) {
    case Expr::Kind::Const:
        out << format_double(e.value);
        break;
    case Expr::Kind::Coord:
        out << names.at(static_cast<size_t>(e.coord));
        break;
    case Expr::Kind::Param:
        out << e.param;
        break;
    case Expr::Kind::Unary:
        if (e.un == UnOp::Neg) {
            out << '-';
            print(*e.a, names, out, 3, true);
        } else {
            const char* fn = nullptr;
            switch (e.un) {
            case UnOp::Sin: fn = "sin"; break;
            case UnOp::Cos: fn = "cos"; break;
            case UnOp::Exp: fn = "exp"; break;
            case UnOp::Sqrt: fn = "sqrt"; break;
            case UnOp::Log: fn = "log"; break;
            case UnOp::Neg: break;
            }
            out << fn << '(';
            print(*e.a, names, out, 0, false);
            out << ')';
        }
        break;
    case Expr::Kind::Binary: {
        if (e.bin == BinOp::Atan2) {
            out << "atan2(";
            print(*e.a, names, out, 0, false);
            out << ", ";
            print(*e.b, names, out, 0, false);
            out << ')';
            break;
        }
        const char* op = nullptr;
        switch (e.bin) {
        case BinOp::Add: op = " + "; break;
        case BinOp::Sub: op = " - "; break;
        case BinOp::Mul: op = "*"; break;
        case BinOp::Div: op = "/"; break;
        case BinOp::Pow: op = "^"; break;
        case BinOp::Atan2: break;
        }
        bool pow = e.bin == BinOp::Pow;
        // Pow is right-associative; others left-associative.
        print(*e.a, names, out, pow ? prec + 1 : prec, false);
        out << op;
        print(*e.b, names, out, prec, !pow);
        break;
    }
    }
    if (parens) out << ')';
}

} // namespace

std::string to_string(const ExprPtr& e, const std::vector<std::string>& coord_names) {
    std::ostringstream out;
    print(*e, coord_names, out, 0, false);
    return out.str();
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& names;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at offset " + std::to_string(pos) + " in '" + text + "'");
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        for (;;) {
            if (eat('+')) lhs = add(lhs, parse_term());
            else if (eat('-')) lhs = sub(lhs, parse_term());
            else return lhs;
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (eat('*')) lhs = mul(lhs, parse_unary());
            else if (eat('/')) lhs = div(lhs, parse_unary());
            else return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (eat('-')) return neg(parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (eat('^')) {
            // right-associative; exponent may itself be negated
            return pow_e(base, parse_unary());
        }
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            ExprPtr inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr parse_number() {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
            ++pos;
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            size_t mark = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
            } else {
                pos = mark; // 'e' belonged to an identifier boundary, not an exponent
            }
        }
        try {
            return constant(std::stod(text.substr(start, pos - start)));
        } catch (const std::exception&) {
            pos = start;
            fail("malformed number");
        }
    }

    ExprPtr parse_ident() {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (peek() == '(') return parse_call(name);
        if (name == "pi") return constant(M_PI);
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return coord(static_cast<int>(i));
        return param(name);
    }

    ExprPtr parse_call(const std::string& fn) {
        if (!eat('(')) fail("expected '('");
        std::vector<ExprPtr> args;
        if (peek() != ')') {
            args.push_back(parse_expr());
            while (eat(',')) args.push_back(parse_expr());
        }
        if (!eat(')')) fail("expected ')' after arguments of " + fn);
        auto arity = [&](size_t n) {
            if (args.size() != n)
                fail(fn + " expects " + std::to_string(n) + " argument(s)");
        };
        if (fn == "sin") { arity(1); return sin_e(args[0]); }
        if (fn == "cos") { arity(1); return cos_e(args[0]); }
        if (fn == "exp") { arity(1); return exp_e(args[0]); }
        if (fn == "sqrt") { arity(1); return sqrt_e(args[0]); }
        if (fn == "log") { arity(1); return log_e(args[0]); }
        if (fn == "pow") { arity(2); return pow_e(args[0], args[1]); }
        if (fn == "atan2") { arity(2); return atan2_e(args[0], args[1]); }
        fail("unknown function '" + fn + "'");
    }
};

} // namespace

ExprPtr parse(const std::string& text, const std::vector<std::string>& coord_names) {
    Parser p{text, coord_names};
    ExprPtr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing characters");
    return e;
}

} // namespace pflow
