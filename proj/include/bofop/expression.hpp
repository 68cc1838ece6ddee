#pragma once

#include <memory>
#include <string>

namespace bofop {

/// Arithmetic expression in two variables `x` and `y`, used as a graphon
/// kernel W(x, y). Supports + - * / ^, unary minus, parentheses, the constant
/// `pi` and the functions exp, log, sqrt, abs, sin, cos, min, max.
class KernelExpression {
public:
    /// Throws std::invalid_argument with the offending position on a syntax error.
    static KernelExpression parse(const std::string& text);

    [[nodiscard]] double operator()(double x, double y) const;
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    KernelExpression(std::string text, std::shared_ptr<const Node> root)
        : text_(std::move(text)), root_(std::move(root)) {}

    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace bofop
