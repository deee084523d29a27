#include "varsparse/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "varsparse/error.hpp"
#include "varsparse/parallel.hpp"

namespace varsparse {

namespace {

void require_same(const Domain& a, const Domain& b) {
    if (!(a == b)) throw PreconditionError("arguments live on different domains");
}

// Values of a translation-invariant kernel on every cell offset, laid out as
// (d0 + N - 1) + (2N - 1)(d1 + N - 1); a single row in one dimension.
struct OffsetTable {
    Index N = 0;
    int n = 1;
    std::vector<double> w;

    Index width() const { return 2 * N - 1; }
    double at(Index d0, Index d1) const {
        const Index row = n == 2 ? d1 + N - 1 : 0;
        return w[static_cast<std::size_t>((d0 + N - 1) + width() * row)];
    }
};

template <class F>
OffsetTable make_table(const Domain& dom, F&& weight) {
    OffsetTable t;
    t.N = dom.cells_per_axis();
    t.n = dom.dim();
    const Index W = t.width();
    const Index rows = t.n == 2 ? W : 1;
    t.w.resize(static_cast<std::size_t>(W * rows));
    parallel_for(rows, [&](std::int64_t r) {
        const Index d1 = t.n == 2 ? r - (t.N - 1) : 0;
        for (Index k = 0; k < W; ++k) t.w[static_cast<std::size_t>(k + W * r)] = weight(k - (t.N - 1), d1);
    });
    return t;
}

double int_pow(double x, int m) {
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= x;
    return r;
}

// out_i = sum_j (b_i - b_j)^m t(i - j) f_j, j = i included only when keep_diagonal
Eigen::ArrayXd pair_sum(const Domain& dom, const OffsetTable& t, const Eigen::ArrayXd* b, const Eigen::ArrayXd& f,
                        int m, bool keep_diagonal) {
    const Index N = dom.cells_per_axis();
    const Index cells = dom.cell_count();
    Eigen::ArrayXd out(cells);
    parallel_for(cells, [&](std::int64_t i) {
        const auto ci = dom.cell_coords(i);
        const double bi = b ? (*b)[i] : 0.0;
        double acc = 0.0;
        const Index rows = dom.dim() == 2 ? N : 1;
        for (Index j1 = 0; j1 < rows; ++j1) {
            const Index d1 = ci[1] - j1;
            const Index base = j1 * N;
            for (Index j0 = 0; j0 < N; ++j0) {
                const Index j = base + j0;
                if (j == i && !keep_diagonal) continue;
                const double fj = f[j];
                if (fj == 0.0) continue;
                double term = t.at(ci[0] - j0, d1) * fj;
                if (m > 0) term *= int_pow(bi - (*b)[j], m);
                acc += term;
            }
        }
        out[i] = acc;
    });
    return out;
}

OffsetTable kernel_table(const CZKernel& k, const Domain& dom) {
    if (k.dimension() != dom.dim()) throw PreconditionError("kernel dimension does not match the domain");
    const double h = dom.cell_side();
    const double vol = dom.cell_volume();
    return make_table(dom, [&](Index d0, Index d1) {
        if (d0 == 0 && d1 == 0) return 0.0;
        return k({static_cast<double>(d0) * h, static_cast<double>(d1) * h}, {0.0, 0.0}) * vol;
    });
}

// Gauss-Legendre nodes and weights on [-1, 1]
struct Rule {
    std::vector<double> x, w;
};

Rule gauss_legendre(int order) {
    Rule r;
    r.x.resize(static_cast<std::size_t>(order));
    r.w.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = order * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) {
                p0 = 1.0;
                p1 = z;
                for (int k = 2; k <= order; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp2 = order * (z * p1 - p0) / (z * z - 1.0);
                r.x[static_cast<std::size_t>(i)] = z;
                r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp2 * dp2);
                break;
            }
        }
    }
    return r;
}

// int over the unit cell centred at offset d of |y|^(alpha - n), unit cell side
double unit_cell_weight(double alpha, int n, Index d0, Index d1) {
    if (n == 1) {
        const double a = std::fabs(static_cast<double>(d0));
        if (d0 == 0) return 2.0 * std::pow(0.5, alpha) / alpha;
        return (std::pow(a + 0.5, alpha) - std::pow(a - 0.5, alpha)) / alpha;
    }
    static const Rule g8 = gauss_legendre(8);
    static const Rule g16 = gauss_legendre(16);
    if (d0 == 0 && d1 == 0) {
        // (8/alpha) int_0^{pi/4} (1/2 / cos t)^alpha dt
        double acc = 0.0;
        for (std::size_t i = 0; i < g16.x.size(); ++i) {
            const double t = std::numbers::pi / 8.0 * (g16.x[i] + 1.0);
            acc += g16.w[i] * std::pow(0.5 / std::cos(t), alpha);
        }
        return 8.0 / alpha * acc * std::numbers::pi / 8.0;
    }
    const double c0 = static_cast<double>(d0), c1 = static_cast<double>(d1);
    if (std::max(std::llabs(d0), std::llabs(d1)) <= 2) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g8.x.size(); ++i)
            for (std::size_t j = 0; j < g8.x.size(); ++j) {
                const double y0 = c0 + 0.5 * g8.x[i], y1 = c1 + 0.5 * g8.x[j];
                acc += g8.w[i] * g8.w[j] * std::pow(std::hypot(y0, y1), alpha - 2.0);
            }
        return acc * 0.25;
    }
    return std::pow(std::hypot(c0, c1), alpha - 2.0);
}

OffsetTable fractional_table(double alpha, const Domain& dom) {
    if (!(alpha > 0.0 && alpha < dom.dim())) throw PreconditionError("fractional order must lie in (0, n)");
    const double scale = std::pow(dom.cell_side(), alpha);
    return make_table(dom, [&](Index d0, Index d1) { return unit_cell_weight(alpha, dom.dim(), d0, d1) * scale; });
}

// 15-point Kronrod nodes on [0, 1] of [-1, 1] with Gauss (7) weights on odd nodes
constexpr double kXk[8] = {0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
                           0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
                           0.207784955007898468, 0.000000000000000000};
constexpr double kWk[8] = {0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
                           0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
                           0.204432940075298892, 0.209482141084727828};
constexpr double kWg[4] = {0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
                           0.417959183673469388};

template <class F>
void kronrod(F&& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kWk[7];
    double g = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const double x = r * kXk[i];
        const double s = f(c - x) + f(c + x);
        k += kWk[i] * s;
        if (i % 2 == 1) g += kWg[i / 2] * s;
    }
    value = k * r;
    error = std::fabs((k - g) * r);
}

template <class F>
double adaptive(F&& f, double a, double b, double tol, int depth) {
    double v, e;
    kronrod(f, a, b, v, e);
    if (e <= tol || depth >= 50) return v;
    const double m = 0.5 * (a + b);
    return adaptive(f, a, m, 0.5 * tol, depth + 1) + adaptive(f, m, b, 0.5 * tol, depth + 1);
}

struct CubeValues {
    std::vector<DyadicCube> cubes;
    std::vector<double> value;
};

GridFunction cellwise_max(const Domain& dom, const CubeValues& cv) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(dom.cell_count());
    for (std::size_t i = 0; i < cv.cubes.size(); ++i)
        for (Index c : cube_cells(cv.cubes[i], dom)) out[c] = std::max(out[c], cv.value[i]);
    return GridFunction(dom, std::move(out));
}

template <class F>
GridFunction maximal_from(const Domain& dom, const CubeUniverse& u, F&& per_cube) {
    CubeValues cv;
    cv.cubes = cube_universe(dom, u);
    cv.value.resize(cv.cubes.size());
    parallel_for(static_cast<std::int64_t>(cv.cubes.size()), [&](std::int64_t i) {
        cv.value[static_cast<std::size_t>(i)] = per_cube(cv.cubes[static_cast<std::size_t>(i)]);
    });
    return cellwise_max(dom, cv);
}

}  // namespace

double CZKernel::operator()(std::array<double, 2> x, std::array<double, 2> y) const {
    if (kind == KernelKind::Hilbert) return 1.0 / (x[0] - y[0]);
    const double d0 = x[0] - y[0], d1 = x[1] - y[1];
    const double r = std::hypot(d0, d1);
    return d0 / (r * r * r);
}

CZKernel hilbert_kernel() { return CZKernel{}; }

CZKernel riesz_kernel() {
    CZKernel k;
    k.kind = KernelKind::Riesz1;
    return k;
}

CZKernel kernel_for_dimension(int n) {
    if (n == 1) return hilbert_kernel();
    if (n == 2) return riesz_kernel();
    throw PreconditionError("no model kernel in dimension " + std::to_string(n));
}

double dini_integral(const std::function<double(double)>& omega, double tolerance) {
    const auto g = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double s = u / (1.0 - u);
        const double v = omega(std::exp(-s));
        if (v == 0.0) return 0.0;
        return v / ((1.0 - u) * (1.0 - u));
    };
    const double r = adaptive(g, 0.0, 1.0, tolerance, 0);
    if (!std::isfinite(r)) throw ConvergenceError("Dini integral diverges");
    return r;
}

GridFunction apply_czo(const CZKernel& k, const GridFunction& f) {
    const Domain& dom = f.domain();
    return GridFunction(dom, pair_sum(dom, kernel_table(k, dom), nullptr, f.values(), 0, false));
}

GridFunction commutator(const CZKernel& k, const GridFunction& b, const GridFunction& f, int m) {
    if (m < 0) throw PreconditionError("commutator order must be non-negative");
    const Domain& dom = f.domain();
    require_same(dom, b.domain());
    return GridFunction(dom, pair_sum(dom, kernel_table(k, dom), &b.values(), f.values(), m, false));
}

double fractional_cell_weight(double alpha, const Domain& dom, std::array<Index, 2> offset) {
    if (!(alpha > 0.0 && alpha < dom.dim())) throw PreconditionError("fractional order must lie in (0, n)");
    return unit_cell_weight(alpha, dom.dim(), offset[0], dom.dim() == 2 ? offset[1] : 0) *
           std::pow(dom.cell_side(), alpha);
}

GridFunction fractional_integral(double alpha, const GridFunction& f) {
    const Domain& dom = f.domain();
    return GridFunction(dom, pair_sum(dom, fractional_table(alpha, dom), nullptr, f.values(), 0, true));
}

GridFunction fractional_commutator(double alpha, const GridFunction& b, const GridFunction& f, int m) {
    if (m < 0) throw PreconditionError("commutator order must be non-negative");
    const Domain& dom = f.domain();
    require_same(dom, b.domain());
    return GridFunction(dom, pair_sum(dom, fractional_table(alpha, dom), &b.values(), f.values(), m, true));
}

GridFunction maximal_plain(const GridFunction& f, const CubeUniverse& u) {
    const Domain& dom = f.domain();
    const Eigen::ArrayXd a = f.values().abs();
    return maximal_from(dom, u, [&](const DyadicCube& q) { return cube_average(a, q, dom); });
}

GridFunction maximal_gphi(const GridFunction& f, const GPhiFunction& psi, const CubeUniverse& u) {
    const Domain& dom = f.domain();
    require_same(dom, psi.domain());
    const Eigen::ArrayXd a = f.values().abs();
    return maximal_from(dom, u, [&](const DyadicCube& q) { return cube_norm(psi, a, q) / indicator_norm(psi, q); });
}

GridFunction maximal_norm_avg(const GridFunction& f, const ExponentFunction& s, const CubeUniverse& u) {
    return maximal_gphi(f, GPhiFunction::power(s), u);
}

GridFunction maximal_fractional(const GridFunction& f, const ExponentFunction& beta, const GPhiFunction& psi,
                                const CubeUniverse& u) {
    const Domain& dom = f.domain();
    require_same(dom, psi.domain());
    require_same(dom, beta.domain());
    const auto B = GPhiFunction::power(beta);
    const Eigen::ArrayXd a = f.values().abs();
    return maximal_from(dom, u, [&](const DyadicCube& q) {
        return indicator_norm(B, q) * cube_norm(psi, a, q) / indicator_norm(psi, q);
    });
}

}  // namespace varsparse
