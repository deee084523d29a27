#pragma once

#include <functional>
#include <string>

#include "varsparse/exponent.hpp"
#include "varsparse/gphi.hpp"
#include "varsparse/grid.hpp"

namespace varsparse {

enum class KernelKind { Hilbert, Riesz1 };

/// Model Calderon-Zygmund kernel: Hilbert 1/(x-y) in n = 1, first Riesz
/// kernel (x1-y1)/|x-y|^3 in n = 2; both satisfy |K| <= C_K/|x-y|^n with C_K = 1.
struct CZKernel {
    KernelKind kind = KernelKind::Hilbert;
    double size_constant = 1.0;
    std::function<double(double)> omega = [](double t) { return t; };

    int dimension() const { return kind == KernelKind::Hilbert ? 1 : 2; }
    double operator()(std::array<double, 2> x, std::array<double, 2> y) const;
};

CZKernel hilbert_kernel();
CZKernel riesz_kernel();
CZKernel kernel_for_dimension(int n);

/// int_0^1 omega(t) dt/t, via t = e^-s, s = u/(1-u) and adaptive Gauss-Kronrod (7, 15).
double dini_integral(const std::function<double(double)>& omega, double tolerance = 1e-8);

/// Tf(x_i) = sum_{j != i} K(x_i, x_j) f_j h^n.
GridFunction apply_czo(const CZKernel& k, const GridFunction& f);
/// T_b^m f(x_i) = sum_{j != i} (b_i - b_j)^m K(x_i, x_j) f_j h^n.
GridFunction commutator(const CZKernel& k, const GridFunction& b, const GridFunction& f, int m);

/// I_alpha f(x_i) = sum_j f_j int_{cell j} |x_i - y|^(alpha - n) dy.
GridFunction fractional_integral(double alpha, const GridFunction& f);
/// sum_j (b_i - b_j)^m f_j int_{cell j} |x_i - y|^(alpha - n) dy.
GridFunction fractional_commutator(double alpha, const GridFunction& b, const GridFunction& f, int m);
/// Weight of cell offset d in the discrete fractional integral.
double fractional_cell_weight(double alpha, const Domain& dom, std::array<Index, 2> offset);

/// Plain dyadic maximal function sup_{Q containing x} <|f|>_Q.
GridFunction maximal_plain(const GridFunction& f, const CubeUniverse& u = {});
/// sup_{Q containing x} ||chi_Q f||_Psi / ||chi_Q||_Psi.
GridFunction maximal_gphi(const GridFunction& f, const GPhiFunction& psi, const CubeUniverse& u = {});
/// The Psi = t^s(.) case.
GridFunction maximal_norm_avg(const GridFunction& f, const ExponentFunction& s, const CubeUniverse& u = {});
/// sup_{Q containing x} ||chi_Q||_beta ||chi_Q f||_Psi / ||chi_Q||_Psi.
GridFunction maximal_fractional(const GridFunction& f, const ExponentFunction& beta, const GPhiFunction& psi,
                                const CubeUniverse& u = {});

}  // namespace varsparse
