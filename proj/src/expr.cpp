#include "varsparse/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

#include "varsparse/error.hpp"

namespace varsparse {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

struct Token {
    enum class Type { Number, Identifier, Symbol, End };
    Type type = Type::End;
    std::string_view text;
    double number = 0.0;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        current_ = Token{};
        current_.offset = pos_;
        if (pos_ >= src_.size()) {
            current_.type = Token::Type::End;
            return;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            current_.type = Token::Type::Identifier;
            current_.text = src_.substr(pos_, end - pos_);
            pos_ = end;
        } else if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
            current_.type = Token::Type::Symbol;
            current_.text = src_.substr(pos_, 1);
            ++pos_;
        } else {
            throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
        }
    }

    void lex_number() {
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        };
        digits();
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            digits();
        }
        // exponent part only if followed by digits, so "2e" lexes as 2 then e
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t look = end + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                end = look;
                digits();
            }
        }
        const std::string_view text = src_.substr(pos_, end - pos_);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
            throw SyntaxError("malformed number '" + std::string(text) + "'", pos_);
        current_.type = Token::Type::Number;
        current_.text = text;
        current_.number = value;
        pos_ = end;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token current_;
};

std::optional<ExprFunction> lookup_function(std::string_view name) {
    if (name == "log") return ExprFunction::Log;
    if (name == "exp") return ExprFunction::Exp;
    if (name == "abs") return ExprFunction::Abs;
    if (name == "min") return ExprFunction::Min;
    if (name == "max") return ExprFunction::Max;
    if (name == "pow") return ExprFunction::Pow;
    if (name == "sin") return ExprFunction::Sin;
    if (name == "cos") return ExprFunction::Cos;
    if (name == "floor") return ExprFunction::Floor;
    return std::nullopt;
}

const char* function_name(ExprFunction f) {
    switch (f) {
        case ExprFunction::Log: return "log";
        case ExprFunction::Exp: return "exp";
        case ExprFunction::Abs: return "abs";
        case ExprFunction::Min: return "min";
        case ExprFunction::Max: return "max";
        case ExprFunction::Pow: return "pow";
        case ExprFunction::Sin: return "sin";
        case ExprFunction::Cos: return "cos";
        case ExprFunction::Floor: return "floor";
    }
    return "?";
}

class Parser {
public:
    Parser(std::string_view src, int dimension) : lexer_(src), dimension_(dimension) {}

    NodePtr parse() {
        NodePtr root = expr();
        const Token& t = lexer_.peek();
        if (t.type != Token::Type::End)
            throw SyntaxError("unexpected '" + std::string(t.text) + "'", t.offset);
        return root;
    }

private:
    bool at_symbol(char c) const {
        const Token& t = lexer_.peek();
        return t.type == Token::Type::Symbol && t.text[0] == c;
    }

    bool starts_operand() const {
        const Token& t = lexer_.peek();
        return t.type == Token::Type::Number || t.type == Token::Type::Identifier ||
               (t.type == Token::Type::Symbol && (t.text[0] == '(' || t.text[0] == '-'));
    }

    // A binary operator must be followed by an operand; report the operator.
    void require_operand(const Token& op) const {
        if (!starts_operand())
            throw SyntaxError("expected operand after '" + std::string(op.text) + "'", op.offset);
    }

    static NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Binary;
        n->op = op;
        n->args = {std::move(lhs), std::move(rhs)};
        return n;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (at_symbol('+') || at_symbol('-')) {
            Token op = lexer_.take();
            require_operand(op);
            lhs = binary(op.text[0], lhs, term());
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (at_symbol('*') || at_symbol('/')) {
            Token op = lexer_.take();
            require_operand(op);
            lhs = binary(op.text[0], lhs, unary());
        }
        return lhs;
    }

    NodePtr unary() {
        if (at_symbol('-')) {
            Token op = lexer_.take();
            require_operand(op);
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::Negate;
            n->args = {unary()};
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (at_symbol('^')) {
            Token op = lexer_.take();
            require_operand(op);
            return binary('^', base, unary());
        }
        return base;
    }

    NodePtr primary() {
        const Token t = lexer_.take();
        switch (t.type) {
            case Token::Type::Number: {
                auto n = std::make_shared<ExprNode>();
                n->kind = ExprNode::Kind::Literal;
                n->value = t.number;
                return n;
            }
            case Token::Type::Identifier: return identifier(t);
            case Token::Type::Symbol:
                if (t.text[0] == '(') {
                    NodePtr inner = expr();
                    expect(')');
                    return inner;
                }
                throw SyntaxError("unexpected '" + std::string(t.text) + "'", t.offset);
            case Token::Type::End: break;
        }
        throw SyntaxError("unexpected end of input", t.offset);
    }

    NodePtr identifier(const Token& t) {
        if (at_symbol('(')) {
            const auto fn = lookup_function(t.text);
            if (!fn) throw SyntaxError("unknown function '" + std::string(t.text) + "'", t.offset);
            lexer_.take();
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::Call;
            n->function = *fn;
            n->args.push_back(expr());
            while (at_symbol(',')) {
                Token comma = lexer_.take();
                require_operand(comma);
                n->args.push_back(expr());
            }
            expect(')');
            check_arity(*n, t);
            return n;
        }
        if (t.text == "e" || t.text == "pi") {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::NamedConstant;
            n->name = std::string(t.text);
            n->value = t.text == "e" ? std::numbers::e : std::numbers::pi;
            return n;
        }
        if (t.text.size() >= 2 && t.text[0] == 'x') {
            int index = 0;
            const auto digits = t.text.substr(1);
            const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
            if (ec == std::errc{} && ptr == digits.data() + digits.size() && index >= 1) {
                if (index > dimension_)
                    throw SyntaxError("variable index exceeds dimension ('" + std::string(t.text) +
                                          "' with n=" + std::to_string(dimension_) + ")",
                                      t.offset);
                auto n = std::make_shared<ExprNode>();
                n->kind = ExprNode::Kind::Variable;
                n->variable = index;
                return n;
            }
        }
        throw SyntaxError("unknown identifier '" + std::string(t.text) + "'", t.offset);
    }

    static void check_arity(const ExprNode& n, const Token& t) {
        const std::size_t k = n.args.size();
        bool ok = true;
        switch (n.function) {
            case ExprFunction::Min:
            case ExprFunction::Max: ok = k >= 2; break;
            case ExprFunction::Pow: ok = k == 2; break;
            default: ok = k == 1; break;
        }
        if (!ok)
            throw SyntaxError("wrong number of arguments to '" + std::string(t.text) + "'", t.offset);
    }

    void expect(char c) {
        const Token& t = lexer_.peek();
        if (!at_symbol(c)) {
            const std::string got = t.type == Token::Type::End ? "end of input" : "'" + std::string(t.text) + "'";
            throw SyntaxError(std::string("expected '") + c + "' but found " + got, t.offset);
        }
        lexer_.take();
    }

    Lexer lexer_;
    int dimension_;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double power(double base, double exponent) {
    if (base == 0.0 && exponent < 0.0) throw DomainError("0 raised to a negative power");
    if (base < 0.0 && exponent != std::floor(exponent))
        throw DomainError("negative base raised to a non-integer power");
    return checked(std::pow(base, exponent), "power");
}

double eval(const ExprNode& n, std::span<const double> x) {
    switch (n.kind) {
        case ExprNode::Kind::Literal:
        case ExprNode::Kind::NamedConstant: return n.value;
        case ExprNode::Kind::Variable: return x[static_cast<std::size_t>(n.variable - 1)];
        case ExprNode::Kind::Negate: return -eval(*n.args[0], x);
        case ExprNode::Kind::Binary: {
            const double a = eval(*n.args[0], x);
            const double b = eval(*n.args[1], x);
            switch (n.op) {
                case '+': return checked(a + b, "addition");
                case '-': return checked(a - b, "subtraction");
                case '*': return checked(a * b, "multiplication");
                case '/':
                    if (b == 0.0) throw DomainError("division by zero");
                    return checked(a / b, "division");
                case '^': return power(a, b);
            }
            break;
        }
        case ExprNode::Kind::Call: {
            const double a = eval(*n.args[0], x);
            switch (n.function) {
                case ExprFunction::Log:
                    if (a <= 0.0) throw DomainError("log of non-positive number");
                    return std::log(a);
                case ExprFunction::Exp: return checked(std::exp(a), "exp");
                case ExprFunction::Abs: return std::fabs(a);
                case ExprFunction::Sin: return std::sin(a);
                case ExprFunction::Cos: return std::cos(a);
                case ExprFunction::Floor: return std::floor(a);
                case ExprFunction::Pow: return power(a, eval(*n.args[1], x));
                case ExprFunction::Min:
                case ExprFunction::Max: {
                    double r = a;
                    for (std::size_t i = 1; i < n.args.size(); ++i) {
                        const double v = eval(*n.args[i], x);
                        r = n.function == ExprFunction::Min ? std::fmin(r, v) : std::fmax(r, v);
                    }
                    return r;
                }
            }
            break;
        }
    }
    throw DomainError("corrupt expression node");
}

void print(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case ExprNode::Kind::Literal: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case ExprNode::Kind::NamedConstant: out += n.name; return;
        case ExprNode::Kind::Variable: out += "x" + std::to_string(n.variable); return;
        case ExprNode::Kind::Negate:
            out += "(-";
            print(*n.args[0], out);
            out += ")";
            return;
        case ExprNode::Kind::Binary:
            out += "(";
            print(*n.args[0], out);
            out += n.op;
            print(*n.args[1], out);
            out += ")";
            return;
        case ExprNode::Kind::Call:
            out += function_name(n.function);
            out += "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ",";
                print(*n.args[i], out);
            }
            out += ")";
            return;
    }
}

}  // namespace

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
        case ExprNode::Kind::Literal:
            if (a.value != b.value) return false;
            break;
        case ExprNode::Kind::NamedConstant:
            if (a.name != b.name) return false;
            break;
        case ExprNode::Kind::Variable:
            if (a.variable != b.variable) return false;
            break;
        case ExprNode::Kind::Binary:
            if (a.op != b.op) return false;
            break;
        case ExprNode::Kind::Call:
            if (a.function != b.function) return false;
            break;
        case ExprNode::Kind::Negate: break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(*a.args[i], *b.args[i])) return false;
    return true;
}

bool operator==(const Expression& a, const Expression& b) {
    return a.dimension_ == b.dimension_ && structurally_equal(*a.root_, *b.root_);
}

Expression parse_expression(std::string_view src, int dimension) {
    if (dimension < 1) throw PreconditionError("expression dimension must be positive");
    bool blank = true;
    for (char c : src) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (blank) throw SyntaxError("empty expression", 0);
    return Expression(Parser(src, dimension).parse(), dimension);
}

double evaluate(const Expression& expr, std::span<const double> point) {
    if (static_cast<int>(point.size()) != expr.dimension())
        throw PreconditionError("point dimension " + std::to_string(point.size()) +
                                " does not match expression dimension " + std::to_string(expr.dimension()));
    return eval(expr.root(), point);
}

std::string to_string(const Expression& expr) {
    std::string out;
    print(expr.root(), out);
    return out;
}

}  // namespace varsparse
