#include "vhs/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "vhs/error.hpp"

namespace vhs {

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Kind;
using Function = Expression::Function;

NodePtr make_leaf(Kind kind, double value = 0.0, std::string name = {}) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->value = value;
    n->name = std::move(name);
    return n;
}

NodePtr make_op(Kind kind, std::vector<NodePtr> args, Function f = Function::sin) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->function = f;
    n->args = std::move(args);
    return n;
}

struct FunctionInfo {
    std::string_view name;
    Function function;
    std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", Function::sin, 1}, {"cos", Function::cos, 1}, {"exp", Function::exp, 1},
    {"abs", Function::abs, 1}, {"max", Function::max, 2}, {"min", Function::min, 2},
    {"pow", Function::pow, 2},
};

const FunctionInfo* find_function(std::string_view name) {
    for (const auto& f : kFunctions) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

std::string_view function_name(Function f) {
    for (const auto& info : kFunctions) {
        if (info.function == f) return info.name;
    }
    return "?";
}

class Parser {
public:
    Parser(std::string_view src, const ParameterTable& params) : src_(src), params_(params) {}

    NodePtr parse() {
        auto e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("expected operator or end of input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            auto rhs = term();
            lhs = make_op(c == '+' ? Kind::add : Kind::sub, {lhs, rhs});
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            auto rhs = unary();
            lhs = make_op(c == '*' ? Kind::mul : Kind::div, {lhs, rhs});
        }
    }

    NodePtr unary() {
        if (peek() == '-') {
            ++pos_;
            return make_op(Kind::negate, {unary()});
        }
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (peek() == '^') {
            ++pos_;
            return make_op(Kind::pow, {base, unary()});
        }
        return base;
    }

    NodePtr number() {
        const std::size_t start = pos_;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), value,
                                         std::chars_format::general);
        if (ec != std::errc()) fail("malformed number");
        pos_ = static_cast<std::size_t>(ptr - src_.data());
        if (!std::isfinite(value)) {
            pos_ = start;
            fail("number out of range");
        }
        return make_leaf(Kind::number, value);
    }

    NodePtr primary() {
        const char c = peek();
        if (c == '\0') fail("expected expression, found end of input");
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            auto e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view id = src_.substr(start, pos_ - start);
            if (peek() == '(') {
                const FunctionInfo* f = find_function(id);
                if (f == nullptr) {
                    pos_ = start;
                    fail("unknown function '" + std::string(id) + "'");
                }
                ++pos_;
                std::vector<NodePtr> args{expr()};
                while (peek() == ',') {
                    ++pos_;
                    args.push_back(expr());
                }
                if (args.size() != f->arity) {
                    fail("function '" + std::string(id) + "' expects " + std::to_string(f->arity) +
                         " argument(s)");
                }
                expect(')');
                return make_op(Kind::call, std::move(args), f->function);
            }
            if (id == "x") return make_leaf(Kind::x);
            if (id == "t") return make_leaf(Kind::t);
            if (id == "pi") return make_leaf(Kind::pi, std::numbers::pi);
            if (auto it = params_.find(id); it != params_.end()) {
                return make_leaf(Kind::parameter, it->second, std::string(id));
            }
            pos_ = start;
            fail("unknown identifier '" + std::string(id) + "'");
        }
        fail(std::string("expected expression, found '") + c + "'");
    }

    std::string_view src_;
    const ParameterTable& params_;
    std::size_t pos_ = 0;
};

double checked(double v) {
    if (!std::isfinite(v)) throw EvalError("expression evaluated to a non-finite value");
    return v;
}

double eval(const Expression::Node& n, double x, double t) {
    switch (n.kind) {
        case Kind::number:
        case Kind::pi:
        case Kind::parameter: return n.value;
        case Kind::x: return x;
        case Kind::t: return t;
        case Kind::negate: return -eval(*n.args[0], x, t);
        case Kind::add: return checked(eval(*n.args[0], x, t) + eval(*n.args[1], x, t));
        case Kind::sub: return checked(eval(*n.args[0], x, t) - eval(*n.args[1], x, t));
        case Kind::mul: return checked(eval(*n.args[0], x, t) * eval(*n.args[1], x, t));
        case Kind::div: {
            const double den = eval(*n.args[1], x, t);
            if (den == 0.0) throw EvalError("division by zero");
            return checked(eval(*n.args[0], x, t) / den);
        }
        case Kind::pow: return checked(std::pow(eval(*n.args[0], x, t), eval(*n.args[1], x, t)));
        case Kind::call: {
            const double a = eval(*n.args[0], x, t);
            switch (n.function) {
                case Function::sin: return checked(std::sin(a));
                case Function::cos: return checked(std::cos(a));
                case Function::exp: return checked(std::exp(a));
                case Function::abs: return std::abs(a);
                case Function::max: return std::max(a, eval(*n.args[1], x, t));
                case Function::min: return std::min(a, eval(*n.args[1], x, t));
                case Function::pow: return checked(std::pow(a, eval(*n.args[1], x, t)));
            }
        }
    }
    throw EvalError("corrupt expression node");
}

void print(const Expression::Node& n, std::string& out) {
    auto binary = [&](const char* op) {
        out += '(';
        print(*n.args[0], out);
        out += op;
        print(*n.args[1], out);
        out += ')';
    };
    switch (n.kind) {
        case Kind::number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case Kind::pi: out += "pi"; return;
        case Kind::x: out += "x"; return;
        case Kind::t: out += "t"; return;
        case Kind::parameter: out += n.name; return;
        case Kind::negate:
            out += "(-";
            print(*n.args[0], out);
            out += ')';
            return;
        case Kind::add: binary(" + "); return;
        case Kind::sub: binary(" - "); return;
        case Kind::mul: binary(" * "); return;
        case Kind::div: binary(" / "); return;
        case Kind::pow: binary("^"); return;
        case Kind::call:
            out += function_name(n.function);
            out += '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i > 0) out += ", ";
                print(*n.args[i], out);
            }
            out += ')';
            return;
    }
}

bool same(const Expression::Node& a, const Expression::Node& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
        case Kind::number:
            if (a.value != b.value) return false;
            break;
        case Kind::parameter:
            if (a.name != b.name || a.value != b.value) return false;
            break;
        case Kind::call:
            if (a.function != b.function) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same(*a.args[i], *b.args[i])) return false;
    }
    return true;
}

}  // namespace

Expression Expression::constant(double value) { return Expression(make_leaf(Kind::number, value)); }

double Expression::operator()(double x, double t) const {
    if (!root_) throw EvalError("empty expression");
    return checked(eval(*root_, x, t));
}

std::string Expression::to_string() const {
    std::string out;
    if (root_) print(*root_, out);
    return out;
}

bool operator==(const Expression& a, const Expression& b) {
    if (!a.root_ || !b.root_) return a.root_ == b.root_;
    return same(*a.root_, *b.root_);
}

Expression parse_expression(std::string_view source, const ParameterTable& parameters) {
    return Expression(Parser(source, parameters).parse());
}

}  // namespace vhs
