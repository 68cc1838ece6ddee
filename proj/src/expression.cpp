#include "bofop/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bofop {

struct KernelExpression::Node {
    enum class Op { Const, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };
    Op op = Op::Const;
    double value = 0.0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = KernelExpression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, std::vector<NodePtr> args = {}, double value = 0.0, std::string fn = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    n->value = value;
    n->fn = std::move(fn);
    return n;
}

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := '-' unary | power
// power  := atom ('^' unary)?
// atom   := number | 'x' | 'y' | 'pi' | name '(' expr (',' expr)* ')' | '(' expr ')'
class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("kernel expression '" + s_ + "': " + what + " at position " +
                                    std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (true) {
            if (accept('+')) {
                lhs = make(Node::Op::Add, {lhs, term()});
            } else if (accept('-')) {
                lhs = make(Node::Op::Sub, {lhs, term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (true) {
            if (accept('*')) {
                lhs = make(Node::Op::Mul, {lhs, unary()});
            } else if (accept('/')) {
                lhs = make(Node::Op::Div, {lhs, unary()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Op::Neg, {unary()});
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Node::Op::Pow, {base, unary()});
        return base;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += used;
            return make(Node::Op::Const, {}, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Node::Op::VarX);
            if (name == "y") return make(Node::Op::VarY);
            if (name == "pi") return make(Node::Op::Const, {}, std::numbers::pi);
            static const std::vector<std::pair<std::string, std::size_t>> functions{
                {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"abs", 1}, {"sin", 1}, {"cos", 1}, {"min", 2}, {"max", 2}};
            for (const auto& [fname, arity] : functions) {
                if (fname != name) continue;
                if (!accept('(')) fail("expected '(' after " + name);
                std::vector<NodePtr> args{expr()};
                while (accept(',')) args.push_back(expr());
                if (!accept(')')) fail("expected ')'");
                if (args.size() != arity) fail(name + " expects " + std::to_string(arity) + " argument(s)");
                return make(Node::Op::Call, std::move(args), 0.0, name);
            }
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

double eval(const Node& n, double x, double y) {
    switch (n.op) {
        case Node::Op::Const: return n.value;
        case Node::Op::VarX: return x;
        case Node::Op::VarY: return y;
        case Node::Op::Neg: return -eval(*n.args[0], x, y);
        case Node::Op::Add: return eval(*n.args[0], x, y) + eval(*n.args[1], x, y);
        case Node::Op::Sub: return eval(*n.args[0], x, y) - eval(*n.args[1], x, y);
        case Node::Op::Mul: return eval(*n.args[0], x, y) * eval(*n.args[1], x, y);
        case Node::Op::Div: return eval(*n.args[0], x, y) / eval(*n.args[1], x, y);
        case Node::Op::Pow: return std::pow(eval(*n.args[0], x, y), eval(*n.args[1], x, y));
        case Node::Op::Call: {
            const double a = eval(*n.args[0], x, y);
            if (n.fn == "exp") return std::exp(a);
            if (n.fn == "log") return std::log(a);
            if (n.fn == "sqrt") return std::sqrt(a);
            if (n.fn == "abs") return std::abs(a);
            if (n.fn == "sin") return std::sin(a);
            if (n.fn == "cos") return std::cos(a);
            const double b = eval(*n.args[1], x, y);
            return n.fn == "min" ? std::min(a, b) : std::max(a, b);
        }
    }
    return 0.0;
}

}  // namespace

KernelExpression KernelExpression::parse(const std::string& text) {
    Parser p(text);
    NodePtr root = p.parse();
    return KernelExpression(text, std::move(root));
}

double KernelExpression::operator()(double x, double y) const { return eval(*root_, x, y); }

}  // namespace bofop
