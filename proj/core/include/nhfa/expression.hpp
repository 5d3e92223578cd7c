#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "nhfa/common.hpp"

namespace nhfa {

/// Values the symbol grammar can reference: x (position), w (spectral
/// parameter omega = |lambda|), xi (integer mode index), t (time, used by
/// wave coefficient profiles).
struct VarValues {
    double x = 0.0;
    double w = 0.0;
    double xi = 0.0;
    double t = 0.0;
};

/// Small arithmetic expression tree over {x, w, xi, t, pi, constants} with
/// +, -, *, /, ^ and exp, log, sin, cos, abs, pow. Immutable; cheap to copy.
class Expr {
  public:
    Expr() = default;

    static Expr constant(double value);
    static Expr variable(const std::string& name);

    /// Parses infix arithmetic, e.g. "1/(1+w)" or "(1+pow(sin(2*pi*x),2))/(1+w)".
    static Expr parse(std::string_view text);

    bool empty() const { return node_ == nullptr; }
    double eval(const VarValues& vars) const;

    /// Exact symbolic derivative; abs is differentiated a.e. via sign.
    Expr derivative(const std::string& var) const;

    bool uses(const std::string& var) const;
    std::string to_string() const;

    Expr operator+(const Expr&) const;
    Expr operator-(const Expr&) const;
    Expr operator*(const Expr&) const;
    Expr operator/(const Expr&) const;

    struct Node;

  private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

}  // namespace nhfa
