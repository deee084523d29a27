#include <cmath>
#include <functional>
#include <limits>

#include "common.hpp"
#include "varsparse/error.hpp"
#include "varsparse/harness/suites.hpp"
#include "varsparse/operators.hpp"
#include "varsparse/sparse.hpp"

namespace varsparse {

namespace {

using detail::row;

struct TestFunction {
    std::string name;
    std::function<GridFunction(const Domain&)> build;
};

GridFunction from_profile(const Domain& dom, const std::function<double(double)>& g) {
    const double R = std::ldexp(1.0, dom.L());
    Eigen::ArrayXd v(dom.cell_count());
    for (Index i = 0; i < dom.cell_count(); ++i) {
        const auto x = dom.cell_center(i);
        const bool inside = dom.dim() == 1 || std::abs(x[1]) < R / 2;
        v[i] = inside ? g(x[0]) : 0.0;
    }
    return GridFunction(dom, std::move(v));
}

/// Ten functions, defined relative to R = 2^L so that they are the same at every resolution.
std::vector<TestFunction> domination_suite(std::uint64_t seed) {
    const auto chi = [](double a, double b) {
        return [a, b](const Domain& dom) {
            const double R = std::ldexp(1.0, dom.L());
            return from_profile(dom, [=](double x) { return x >= a * R && x < b * R ? 1.0 : 0.0; });
        };
    };
    std::vector<TestFunction> s{
        {"chi[0,R/2)", chi(0.0, 0.5)},
        {"chi[-R/4,R/4)", chi(-0.25, 0.25)},
        {"chi[0,R/64)", chi(0.0, 1.0 / 64)},
        {"signed pair", [](const Domain& dom) {
             const double R = std::ldexp(1.0, dom.L());
             return from_profile(dom, [=](double x) {
                 if (x >= -R / 2 && x < -R / 4) return 1.0;
                 if (x >= R / 4 && x < R / 2) return -1.0;
                 return 0.0;
             });
         }},
        {"|x|^-1/4 on [-R/2,R/2)", [](const Domain& dom) {
             const double R = std::ldexp(1.0, dom.L());
             return from_profile(dom, [=](double x) { return x >= -R / 2 && x < R / 2 ? std::pow(std::abs(x), -0.25) : 0.0; });
         }},
        {"smooth bump", [](const Domain& dom) {
             const double R = std::ldexp(1.0, dom.L());
             return from_profile(dom, [=](double x) {
                 const double u = 2.0 * x / R;
                 return std::abs(u) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0;
             });
         }},
    };
    for (int k = 0; k < 4; ++k) {
        const bool sign = k >= 2;
        s.push_back({std::string("random step ") + std::to_string(k) + (sign ? " signed" : ""),
                     [seed, k, sign](const Domain& dom) {
                         auto rng = trial_rng(seed, static_cast<std::uint64_t>(k));
                         StepOptions opt;
                         opt.level = dom.L() - 3;
                         opt.random_sign = sign;
                         return random_step_function(dom, rng, opt);
                     }});
    }
    return s;
}

struct FieldRatio {
    double sup = 0.0;
    Index cell = 0;
    Index zero_denominator = 0;
};

}  // namespace

Report verify_sparse_domination(const std::string& kind, int m, const ExperimentConfig& c) {
    if (kind != "czo" && kind != "fractional") throw ConfigError("domination kind must be czo or fractional");
    if (m < 0) throw ConfigError("m must be non-negative");
    const std::string id = kind == "czo" ? "dominate_czo" : "dominate_fractional";
    const auto Js = detail::sweep_or(c, c.n == 1 ? std::vector<int>{8, 10, 12} : std::vector<int>{4, 5, 6});
    const double alpha = kind == "czo" ? 0.0 : c.op.alpha;
    const CZKernel kernel = c.op.kernel == "riesz"     ? riesz_kernel()
                            : c.op.kernel == "hilbert" ? hilbert_kernel()
                                                       : kernel_for_dimension(c.n);
    const auto suite = domination_suite(c.seed);
    const std::string mtag = "m=" + std::to_string(m);

    Report r;
    std::vector<double> sup_at;
    for (int J : Js) {
        const Domain dom = c.domain(J);
        const auto b = c.sample_expression("b", "sin(3*x1) + x1", dom);
        const auto shifts = all_shifts(dom.dim());
        double sup = 0.0;
        std::string witness = "none";
        Index zero_cells = 0;
        for (const auto& tf : suite) {
            const auto f = tf.build(dom);
            const GridFunction absf(dom, f.values().abs());
            const auto T = kind == "czo" ? commutator(kernel, b, f, m) : fractional_commutator(alpha, b, f, m);
            Eigen::ArrayXd denom = Eigen::ArrayXd::Zero(dom.cell_count());
            for (const auto& sh : shifts) {
                const auto S = oscillation_augment(cz_sparse_grid(absf, sh), b);
                for (int h = 0; h <= m; ++h) denom += apply_Amh(S, b, f, m, h, alpha).values();
            }
            for (Index i = 0; i < dom.cell_count(); ++i) {
                const double t = std::abs(T[i]);
                if (denom[i] == 0.0) {
                    ++zero_cells;
                    continue;
                }
                if (t / denom[i] > sup) {
                    sup = t / denom[i];
                    witness = tf.name + " cell " + std::to_string(i);
                }
            }
        }
        sup_at.push_back(sup);
        r.add(row(id, mtag + " sup ratio", sup, witness, J, c.seed, std::isfinite(sup),
                  "zero-denominator cells excluded: " + std::to_string(zero_cells)));
    }
    double factor = 1.0;
    std::string where;
    for (std::size_t i = 1; i < sup_at.size(); ++i) {
        const double a = sup_at[i - 1], b = sup_at[i];
        const double f = a == 0.0 && b == 0.0 ? 1.0 : std::max(a / b, b / a);
        if (f > factor || where.empty()) {
            factor = f;
            where = "J=" + std::to_string(Js[i - 1]) + "," + std::to_string(Js[i]);
        }
    }
    r.add(row(id, mtag + " consecutive-J stability factor", factor, where, Js.back(), c.seed,
              std::isfinite(factor) && factor <= c.tolerance("stability", 2.0)));
    return r;
}

}  // namespace varsparse
