// Arithmetic expression compiler for conformal factors phi(x,y[,z]).
// Recursive-descent parser with the usual precedence ( ^ > unary - > * / > + - ),
// compiled to a flat postfix program evaluated on a small stack.
#pragma once

#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isolab::expr {

// Parse failure; `offset` is the byte position in the source string and
// `expected` names the token class the parser was looking for.
class ParseError : public std::runtime_error {
public:
    ParseError(size_t offset, const std::string& expected)
        : std::runtime_error("parse error at offset " + std::to_string(offset) +
                             ": expected " + expected),
          offset_(offset),
          expected_(expected) {}
    size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    size_t offset_;
    std::string expected_;
};

enum class Op : uint8_t {
    PushConst,
    PushVar,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
};

struct Instr {
    Op op;
    uint8_t arg = 0;     // variable index for PushVar
    double value = 0.0;  // literal for PushConst
};

// Compiled expression over variables x, y, z (indices 0, 1, 2).
class Program {
public:
    Program() = default;

    double eval(const double* vars) const {
        std::array<double, 64> stack;
        size_t top = 0;
        for (const Instr& ins : code_) {
            switch (ins.op) {
                case Op::PushConst: stack[top++] = ins.value; break;
                case Op::PushVar: stack[top++] = vars[ins.arg]; break;
                case Op::Add: --top; stack[top - 1] += stack[top]; break;
                case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
                case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
                case Op::Div: --top; stack[top - 1] /= stack[top]; break;
                case Op::Pow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
                case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
                case Op::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
                case Op::Cos: stack[top - 1] = std::cos(stack[top - 1]); break;
                case Op::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
                case Op::Log: stack[top - 1] = std::log(stack[top - 1]); break;
                case Op::Sqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
            }
        }
        return stack[0];
    }

    double eval2(double x, double y) const {
        const double v[3] = {x, y, 0.0};
        return eval(v);
    }

    int max_var() const { return max_var_; }
    bool empty() const { return code_.empty(); }
    const std::string& source() const { return source_; }

    static Program parse(std::string_view src, int n_vars);

private:
    std::vector<Instr> code_;
    int max_var_ = -1;
    std::string source_;
    friend class Parser;
};

class Parser {
public:
    Parser(std::string_view src, int n_vars) : src_(src), n_vars_(n_vars) {}

    Program run() {
        Program p;
        p.source_ = std::string(src_);
        parse_expr(p);
        skip_ws();
        if (pos_ != src_.size()) throw ParseError(pos_, "end of input");
        p.max_var_ = max_var_;
        return p;
    }

private:
    std::string_view src_;
    size_t pos_ = 0;
    int n_vars_;
    int max_var_ = -1;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!eat(c)) throw ParseError(pos_, what);
    }

    // expr := term (('+'|'-') term)*
    void parse_expr(Program& p) {
        parse_term(p);
        for (;;) {
            if (eat('+')) {
                parse_term(p);
                p.code_.push_back({Op::Add});
            } else if (eat('-')) {
                parse_term(p);
                p.code_.push_back({Op::Sub});
            } else {
                return;
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    void parse_term(Program& p) {
        parse_unary(p);
        for (;;) {
            if (eat('*')) {
                parse_unary(p);
                p.code_.push_back({Op::Mul});
            } else if (eat('/')) {
                parse_unary(p);
                p.code_.push_back({Op::Div});
            } else {
                return;
            }
        }
    }

    // unary := '-' unary | power, so -x^2 means -(x^2)
    void parse_unary(Program& p) {
        if (eat('-')) {
            parse_unary(p);
            p.code_.push_back({Op::Neg});
            return;
        }
        parse_power(p);
    }

    // power := primary ('^' unary)?   -- right associative, exponent may be signed
    void parse_power(Program& p) {
        parse_primary(p);
        if (eat('^')) {
            parse_unary(p);
            p.code_.push_back({Op::Pow});
        }
    }

    void parse_primary(Program& p) {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "a number, name, or '('");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            parse_expr(p);
            expect(')', "')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number(p);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            parse_name(p);
            return;
        }
        throw ParseError(pos_, "a number, name, or '('");
    }

    void parse_number(Program& p) {
        const size_t start = pos_;
        errno = 0;
        char* end = nullptr;
        // src_ views a NUL-terminated std::string held by the caller of parse().
        const double v = std::strtod(src_.data() + start, &end);
        if (end == src_.data() + start) throw ParseError(start, "a numeric literal");
        pos_ = size_t(end - src_.data());
        p.code_.push_back({Op::PushConst, 0, v});
    }

    void parse_name(Program& p) {
        const size_t start = pos_;
        while (pos_ < src_.size() &&
               std::isalnum(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name.size() == 1 && (name[0] == 'x' || name[0] == 'y' || name[0] == 'z')) {
            const int idx = name[0] - 'x';
            if (idx >= n_vars_) throw ParseError(start, "a variable valid in this dimension");
            max_var_ = std::max(max_var_, idx);
            p.code_.push_back({Op::PushVar, uint8_t(idx)});
            return;
        }
        Op fn;
        if (name == "sin") fn = Op::Sin;
        else if (name == "cos") fn = Op::Cos;
        else if (name == "exp") fn = Op::Exp;
        else if (name == "log") fn = Op::Log;
        else if (name == "sqrt") fn = Op::Sqrt;
        else throw ParseError(start, "a known function or variable");
        expect('(', "'('");
        parse_expr(p);
        expect(')', "')'");
        p.code_.push_back({fn});
    }
};

inline Program Program::parse(std::string_view src, int n_vars) {
    // Keep a NUL-terminated copy alive for strtod.
    std::string owned(src);
    return Parser(owned, n_vars).run();
}

}  // namespace isolab::expr
