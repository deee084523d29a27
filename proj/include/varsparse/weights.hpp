#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "varsparse/exponent.hpp"
#include "varsparse/gphi.hpp"
#include "varsparse/grid.hpp"

namespace varsparse {

/// Strictly positive, finite grid function.
class Weight {
public:
    explicit Weight(GridFunction w);
    static Weight from_expression(std::string_view src, const Domain& dom);

    const GridFunction& function() const { return w_; }
    const Eigen::ArrayXd& values() const { return w_.values(); }
    const Domain& domain() const { return w_.domain(); }

    Weight inverse() const;
    /// w^s
    Weight pow(double s) const;

private:
    GridFunction w_;
};

/// Cube functional a(Q): Constant(c), PowerMeasure(delta) = |Q|^(delta/n),
/// VarNorm(delta(.)) = ||chi_Q||_{n/delta(.)}.
class CubeFunctional {
public:
    enum class Kind { Constant, PowerMeasure, VarNorm };

    static CubeFunctional constant(double c);
    static CubeFunctional power_measure(double delta);
    static CubeFunctional var_norm(const GridFunction& delta);

    Kind kind() const { return kind_; }
    double operator()(const DyadicCube& q, const Domain& dom) const;

private:
    Kind kind_ = Kind::Constant;
    double c_ = 1.0;
    std::shared_ptr<const GPhiFunction> norm_;
};

struct ScanResult {
    double value = 0.0;
    DyadicCube witness;
    std::string witness_id;
};

/// max over cubes of g(Q); ties keep the first cube in canonical order.
ScanResult scan_cubes(const Domain& dom, const std::vector<DyadicCube>& cubes,
                      const std::function<double(const DyadicCube&)>& g);

/// max over nested pairs Q' in Q (same grid, Q' = Q included) of a(Q')/a(Q).
ScanResult t_infty_constant(const CubeFunctional& a, const Domain& dom, const CubeUniverse& u = {});

/// sup_Q ||chi_Q w||_p ||chi_Q w^-1||_p' / |Q|.
ScanResult ap_constant(const Weight& w, const ExponentFunction& p, const CubeUniverse& u = {});
/// sup_Q (||chi_Q w||_q / ||chi_Q||_q)(||chi_Q w^-1||_p' / ||chi_Q||_p').
ScanResult apq_constant(const Weight& w, const ExponentFunction& p, const ExponentFunction& q,
                        const CubeUniverse& u = {});

/// sup_Q a(Q)^m (||chi_Q w||_Sp / ||chi_Q||_Sp)(||chi_Q v^-1||_Rp' / ||chi_Q||_Rp').
/// Requires S > p+/p- and R > (p')+/(p')-.
ScanResult bump_constant_power(const Weight& w, const Weight& v, const ExponentFunction& p, double S, double R,
                               const CubeFunctional& a, int m, const CubeUniverse& u = {});
/// sup_Q ||chi_Q||^m_{n/delta} (||chi_Q w||_E / ||chi_Q||_E)(||chi_Q v^-1||_A / ||chi_Q||_A).
ScanResult bump_constant_gphi(const Weight& w, const Weight& v, const GPhiFunction& E, const GPhiFunction& A,
                              const GridFunction& delta, int m, const CubeUniverse& u = {});

/// The extremal weight v(x) = max over cubes Q containing x of a(Q)^m ||chi_Q w||_Sp / ||chi_Q||_Sp,
/// or with a Phi-function in place of the Sp norm.
Weight remark_extremal_weight(const Weight& w, const ExponentFunction& p, double S, const CubeFunctional& a, int m,
                              const CubeUniverse& u = {});
Weight remark_extremal_weight(const Weight& w, const GPhiFunction& E, const GridFunction& delta, int m,
                              const CubeUniverse& u = {});

struct OpennessResult {
    double s = 0.0, r = 0.0;              // largest admissible candidates
    double s_smallest = 0.0, r_smallest = 0.0;  // end of the admissible run
    double cap = 0.0;
    double s_constant = 0.0, r_constant = 0.0;  // A_{sp} and A_{rq'} constants at s, r
    ExponentFunction u;                   // u' = (sp)'/s
    ExponentFunction v;                   // v = (rq')'/r
    double p_over_u_minus = 0.0;          // (p/u)^-
    double qc_over_vc_minus = 0.0;        // (q'/v')^-
};

/// Searches s in (1/p-, 1) and r in (1/(q')-, 1) over 64 Chebyshev-spaced
/// candidates each, scanning downwards from 1, for w^(1/s) in A_{sp} and
/// w^(-1/r) in A_{rq'} below `cap` (default: 4 max([w]_{A_p}, [w^-1]_{A_q'})).
OpennessResult openness_exponents(const Weight& w, const ExponentFunction& p, const ExponentFunction& q,
                                  std::optional<double> cap = std::nullopt, const CubeUniverse& u = {});

/// int_Q |b - b_Q|.
double cube_oscillation(const GridFunction& b, const DyadicCube& q);

/// sup_Q (1/(a(Q)|Q|)) int_Q |b - b_Q|.
ScanResult lipschitz_a_norm(const GridFunction& b, const CubeFunctional& a, const CubeUniverse& u = {});
/// sup_Q int_Q |b - b_Q| / (||chi_Q||_{n/delta} eta(Q)), eta(Q) = int_Q eta.
ScanResult bmo_eta_delta_norm(const GridFunction& b, const GridFunction& eta, const GridFunction& delta,
                              const CubeUniverse& u = {});
/// max over z in 3Q (inside the box) of |b(z) - b_Q| / ||chi_Q||_{n/delta}.
double symbol_pointwise_bound(const GridFunction& b, const DyadicCube& q, const GridFunction& delta);
ScanResult symbol_pointwise_scan(const GridFunction& b, const GridFunction& delta, const CubeUniverse& u = {});
/// sup_Q ||chi_Q (b - b_Q)^k||_p / (||chi_Q||_p a(Q)^k).
ScanResult izuki_ratio(const GridFunction& b, const CubeFunctional& a, const ExponentFunction& p, int k,
                       const CubeUniverse& u = {});

struct SweepVerdict {
    std::vector<int> J;
    std::vector<double> values;
    double max_growth = 1.0;  // largest ratio between consecutive entries
    bool divergent = false;   // some step grows by >= 1.5 per two levels
    bool finite = true;
};

/// Evaluates a constant at each resolution and flags growth of at least
/// x1.5 per +2 levels (scaled geometrically for other spacings).
SweepVerdict sweep_constant(const std::vector<int>& J, const std::function<double(int)>& constant_at);

}  // namespace varsparse
