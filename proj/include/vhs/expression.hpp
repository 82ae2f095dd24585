#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace vhs {

/// Named constants that coefficient expressions may reference (sweep knobs).
using ParameterTable = std::map<std::string, double, std::less<>>;

/// Immutable expression tree over x, t, pi, named parameters, + - * / ^,
/// unary minus and sin, cos, exp, abs, max, min, pow.
///
/// Grammar, lowest precedence first:
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?
///     primary := number | 'x' | 't' | 'pi' | name | func '(' args ')' | '(' expr ')'
///
/// `^` binds tighter than unary minus and associates to the right.
class Expression {
public:
    enum class Kind { number, pi, x, t, parameter, negate, add, sub, mul, div, pow, call };
    enum class Function { sin, cos, exp, abs, max, min, pow };

    struct Node {
        Kind kind = Kind::number;
        double value = 0.0;  // literal or bound parameter value
        std::string name;    // parameter name
        Function function = Function::sin;
        std::vector<std::shared_ptr<const Node>> args;
    };

    Expression() = default;
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    static Expression constant(double value);

    bool empty() const noexcept { return root_ == nullptr; }
    const Node& root() const { return *root_; }

    /// Throws EvalError on division by zero or a non-finite result.
    double operator()(double x, double t) const;

    /// Fully parenthesised form that re-parses to the same tree.
    std::string to_string() const;

    friend bool operator==(const Expression& a, const Expression& b);

private:
    std::shared_ptr<const Node> root_;
};

Expression parse_expression(std::string_view source, const ParameterTable& parameters = {});

inline double evaluate(const Expression& e, double x, double t) { return e(x, t); }

}  // namespace vhs
