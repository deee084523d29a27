#pragma once

// Closed-form expression language used to declare exponents, weights,
// symbols and test functions. Grammar (whitespace-insensitive):
//
//   expr    := term { ("+" | "-") term }
//   term    := unary { ("*" | "/") unary }
//   unary   := "-" unary | power
//   power   := primary [ "^" unary ]          (right-associative)
//   primary := number | "e" | "pi" | "x" digits
//            | name "(" expr { "," expr } ")" | "(" expr ")"
//
// See docs/expression_grammar.md for the full EBNF.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace varsparse {

enum class ExprFunction { Log, Exp, Abs, Min, Max, Pow, Sin, Cos, Floor };

struct ExprNode {
    enum class Kind { Literal, NamedConstant, Variable, Negate, Binary, Call };

    Kind kind = Kind::Literal;
    double value = 0.0;           // Literal, NamedConstant
    std::string name;             // NamedConstant ("e" | "pi")
    int variable = 0;             // Variable, 1-based
    char op = 0;                  // Binary: + - * / ^
    ExprFunction function = ExprFunction::Log;
    std::vector<std::shared_ptr<const ExprNode>> args;
};

/// Immutable parsed expression. Copies share the tree.
class Expression {
public:
    Expression(std::shared_ptr<const ExprNode> root, int dimension)
        : root_(std::move(root)), dimension_(dimension) {}

    const ExprNode& root() const { return *root_; }
    int dimension() const { return dimension_; }

    friend bool operator==(const Expression& a, const Expression& b);

private:
    std::shared_ptr<const ExprNode> root_;
    int dimension_;
};

bool structurally_equal(const ExprNode& a, const ExprNode& b);

/// Parses `src` for points in R^dimension. Throws SyntaxError (with byte
/// offset) for malformed input, unknown identifiers or variables x_k with
/// k > dimension.
Expression parse_expression(std::string_view src, int dimension);

/// Evaluates at `point` (size must equal the dimension). Throws DomainError
/// for log of non-positive numbers, 0 to a negative power, division by zero
/// and any other non-finite intermediate.
double evaluate(const Expression& expr, std::span<const double> point);

/// Canonical fully parenthesised text; parse(to_string(e)) == e.
std::string to_string(const Expression& expr);

}  // namespace varsparse
