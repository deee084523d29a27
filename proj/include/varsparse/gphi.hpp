#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "varsparse/exponent.hpp"
#include "varsparse/grid.hpp"

namespace varsparse {

enum class GPhiKind { Power, PowerLog, LinearLog, Numeric };

/// Generalised Phi-function Psi(x, t), constant in x on each cell.
///
/// Cells sharing the same parameters share one "profile", so per-x work
/// (conjugates, inverse scans) is done once per distinct profile.
///
///   Power     Psi = c(x) t^p(x); where p(x) = inf, Psi = 0 for t <= c(x) and inf beyond
///   PowerLog  Psi = t^p(x) log(e + t)^q(x)
///   LinearLog Psi = t log(e + t)
///   Numeric   piecewise linear in t through values on a fixed log-spaced node grid
class GPhiFunction {
public:
    struct Profile {
        double p = 1.0;
        double q = 0.0;
        double coeff = 1.0;
        int table = -1;
    };

    static GPhiFunction power(const ExponentFunction& p);
    static GPhiFunction power(const ExponentFunction& p, const Eigen::ArrayXd& coeff);
    static GPhiFunction power_log(const ExponentFunction& p, const GridFunction& q);
    static GPhiFunction linear_log(const Domain& dom);
    /// Numeric family; `tables[cell_table[c]]` holds Psi at numeric_nodes().
    static GPhiFunction numeric(const Domain& dom, std::vector<std::vector<double>> tables,
                                std::vector<std::int32_t> cell_table);
    /// Numeric tabulation of any family on numeric_nodes().
    static GPhiFunction tabulate(const GPhiFunction& psi);

    /// Log-spaced nodes 2^((k-256)/12), k = 0..511; node 256 is exactly 1.
    static const std::array<double, 512>& numeric_nodes();

    GPhiKind kind() const { return kind_; }
    const Domain& domain() const { return dom_; }

    double operator()(Index cell, double t) const { return eval_profile(cell_profile_[static_cast<std::size_t>(cell)], t); }
    double eval_profile(std::int32_t profile, double t) const;

    std::int32_t profile_of(Index cell) const { return cell_profile_[static_cast<std::size_t>(cell)]; }
    std::size_t profile_count() const { return profiles_.size(); }
    const Profile& profile(std::int32_t i) const { return profiles_[static_cast<std::size_t>(i)]; }
    /// First cell carrying a profile (for reporting).
    Index representative_cell(std::int32_t profile) const { return representatives_[static_cast<std::size_t>(profile)]; }

    /// Lower growth exponent used to seed norm brackets (p^- for Power, else 1).
    double growth_exponent() const { return growth_; }
    /// Threshold c(x) of the infinite branch, or +inf when Psi(x,.) is finite everywhere.
    double infinite_threshold(Index cell) const;
    bool has_infinite_branch() const { return has_inf_branch_; }

    const std::vector<std::vector<double>>& tables() const { return *tables_; }

private:
    GPhiFunction(GPhiKind kind, Domain dom) : kind_(kind), dom_(std::move(dom)) {}
    void assign_profiles(const std::vector<Profile>& per_cell);

    GPhiKind kind_;
    Domain dom_;
    std::vector<Profile> profiles_;
    std::vector<std::int32_t> cell_profile_;
    std::vector<Index> representatives_;
    std::shared_ptr<const std::vector<std::vector<double>>> tables_ =
        std::make_shared<const std::vector<std::vector<double>>>();
    double growth_ = 1.0;
    bool has_inf_branch_ = false;
};

/// Bisection controls for Luxemburg norms. The bracket is shrunk until
/// hi/lo - 1 <= relative_tolerance; the upper end (modular <= 1) is returned.
struct NormOptions {
    double relative_tolerance = 1e-13;
    int max_bisection_steps = 200;
};

/// Sum over cells of Psi(x, |f|/lambda) h^n; +inf if an infinite branch is exceeded.
double modular(const GPhiFunction& psi, const GridFunction& f, double lambda);
double modular(const GPhiFunction& psi, const Eigen::ArrayXd& values, double lambda);

/// inf{lambda > 0 : modular <= 1}; 0 for f = 0, +inf when no lambda works.
double luxemburg_norm(const GPhiFunction& psi, const GridFunction& f, const NormOptions& opt = {});
double luxemburg_norm(const GPhiFunction& psi, const Eigen::ArrayXd& values, const NormOptions& opt = {});
/// Norm of chi_Q f.
double cube_norm(const GPhiFunction& psi, const Eigen::ArrayXd& values, const DyadicCube& q,
                 const NormOptions& opt = {});
/// Norm of chi_Q.
double indicator_norm(const GPhiFunction& psi, const DyadicCube& q, const NormOptions& opt = {});
/// Norm of the function taking value |values[i]| on cells[i] and 0 elsewhere.
double norm_on_cells(const GPhiFunction& psi, std::span<const Index> cells, std::span<const double> values,
                     const NormOptions& opt = {});

/// ||f w||_Psi.
double weighted_norm(const GPhiFunction& psi, const GridFunction& f, const GridFunction& w,
                     const NormOptions& opt = {});

/// Psi*(x,u) = sup_t (t u - Psi(x,t)). Closed form for Power, Numeric otherwise.
GPhiFunction conjugate_gphi(const GPhiFunction& psi);

/// Generalised inverse inf{u >= 0 : Psi(x,u) >= t}.
double inverse_gphi(const GPhiFunction& psi, Index cell, double t);
double inverse_profile(const GPhiFunction& psi, std::int32_t profile, double t);

struct ConditionFReport {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    std::string c1_witness, c2_witness, c3_witness;
};

/// Fitted constants of condition F over the cubes with levels in [kmin, kmax]
/// of the given grids, and over (cell, t) for t = 2^(j/2), |j| <= 40.
ConditionFReport check_condition_F(const GPhiFunction& A, const GPhiFunction& B, const GPhiFunction& D, int kmin,
                                   int kmax, const std::vector<GridShift>& shifts);

/// Largest violation of monotonicity/convexity on the node grid, per profile (0 if valid).
double phi_axiom_defect(const GPhiFunction& psi);

/// Shorthand for the variable Lebesgue norm ||f||_{p(.)}.
double lp_norm(const ExponentFunction& p, const GridFunction& f, const NormOptions& opt = {});

}  // namespace varsparse
