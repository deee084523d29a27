#pragma once

#include <optional>
#include <string_view>

#include "varsparse/grid.hpp"

namespace varsparse {

/// Variable exponent p(.) with values in [1, inf]. Cells with p = inf form
/// the infinity mask. p_inf is the declared limit at infinity (never inferred).
class ExponentFunction {
public:
    ExponentFunction(GridFunction values, std::optional<double> p_inf = std::nullopt);

    static ExponentFunction constant(const Domain& dom, double p, std::optional<double> p_inf = std::nullopt);
    static ExponentFunction from_expression(std::string_view src, const Domain& dom,
                                            std::optional<double> p_inf = std::nullopt);

    const GridFunction& function() const { return values_; }
    const Eigen::ArrayXd& values() const { return values_.values(); }
    const Domain& domain() const { return values_.domain(); }
    double operator[](Index cell) const { return values_[cell]; }

    double minus() const { return minus_; }
    double plus() const { return plus_; }
    std::optional<double> p_inf() const { return p_inf_; }
    bool has_infinity() const { return std::isinf(plus_); }
    bool is_infinite(Index cell) const { return std::isinf(values_[cell]); }
    bool is_constant() const { return minus_ == plus_; }

private:
    GridFunction values_;
    std::optional<double> p_inf_;
    double minus_;
    double plus_;
};

/// p' = p/(p-1), with 1 <-> inf.
double conjugate_exponent(double p);
ExponentFunction conjugate(const ExponentFunction& p);

struct LogHolderReport {
    double c_local = 0.0;
    double c_global = 0.0;
    Index local_x = -1, local_y = -1;  // attaining cell pair
    Index global_cell = -1;
    Index pairs_sampled = 0;
};

/// Fitted local and global log-Hoelder constants of 1/p over sampled cell pairs.
LogHolderReport check_log_holder(const ExponentFunction& p);

/// Fitted constant of |q(x)-q(y)| log(e + log(e + 1/|x-y|)) over the same pairs.
double check_loglog(const GridFunction& q);

/// beta with 1/beta = 1/p - 1/q (cells with p == q give beta = inf). Requires p <= q.
ExponentFunction reciprocal_subtract(const ExponentFunction& p, const ExponentFunction& q);
/// s with 1/s = 1/p + 1/q; s may drop below 1, in which case a PreconditionError is raised.
ExponentFunction reciprocal_add(const ExponentFunction& p, const ExponentFunction& q);

/// s * p(.). Requires s * p^- >= 1 (the boundary s = 1/p^- is allowed).
ExponentFunction scale(const ExponentFunction& p, double s);

/// delta(x) = n (alpha/n - 1/r(x)); requires n/alpha <= r^-.
GridFunction delta_from(const ExponentFunction& r, double alpha);

/// delta with (m delta + alpha)/n = 1/p - 1/q (alpha = 0 for singular integrals).
/// Requires the right-hand side to be non-negative and below 1 cellwise.
GridFunction delta_from_pair(const ExponentFunction& p, const ExponentFunction& q, int m, double alpha = 0.0);

/// The exponent n/delta(.) (inf where delta = 0) used in ||chi_Q||_{n/delta}.
ExponentFunction exponent_from_delta(const GridFunction& delta);

}  // namespace varsparse
