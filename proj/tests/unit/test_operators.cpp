#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "varsparse/error.hpp"
#include "varsparse/operators.hpp"
#include "varsparse/random.hpp"

using namespace varsparse;

namespace {

GridFunction from(const Domain& d, double (*g)(double)) {
    Eigen::ArrayXd v(d.cell_count());
    for (Index c = 0; c < v.size(); ++c) v[c] = g(d.cell_center(c)[0]);
    return GridFunction(d, std::move(v));
}

Index cell_at(const Domain& d, double x) {
    return static_cast<Index>(std::floor((x + std::ldexp(1.0, d.L())) / d.cell_side()));
}

GridFunction unit_indicator(const Domain& d) {
    return from(d, [](double x) { return x >= 0.0 && x < 1.0 ? 1.0 : 0.0; });
}

}  // namespace

TEST_CASE("Dini integrals") {
    CHECK(dini_integral([](double t) { return t; }) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(dini_integral([](double t) { return std::sqrt(t); }) == doctest::Approx(2.0).epsilon(1e-8));
    const auto log_mod = [](double t) {
        const double l = std::log(std::numbers::e / t);
        return 1.0 / (l * l);
    };
    const double a = dini_integral(log_mod, 1e-8), b = dini_integral(log_mod, 1e-11);
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
    CHECK(a == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("kernel size bound") {
    const auto h = hilbert_kernel();
    const auto r = riesz_kernel();
    for (double x : {0.1, -0.7, 3.0})
        for (double y : {0.2, 1.5, -2.0}) {
            CHECK(std::abs(h({x, 0}, {y, 0})) <= h.size_constant / std::abs(x - y) * (1 + 1e-15));
            const double d = std::hypot(x - y, x * y - 0.3);
            CHECK(std::abs(r({x, x * y}, {y, 0.3})) <= r.size_constant / (d * d) * (1 + 1e-15));
        }
    CHECK(kernel_for_dimension(2).kind == KernelKind::Riesz1);
}

TEST_CASE("Hilbert transform of an interval") {
    const Domain d(1, 2, 10);
    const auto f = unit_indicator(d);
    const auto tf = apply_czo(hilbert_kernel(), f);
    const Index i = cell_at(d, 2.0);
    CHECK(std::abs(tf[i] - std::log(2.0)) <= 5e-3);

    // symmetric f gives zero at the centre of symmetry
    const Domain e(1, 0, 6);
    const Index c = 40;
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(e.cell_count());
    for (Index k = 0; k < 10; ++k) v[c + k] = v[c - k] = 1.0 + 0.1 * k;
    const auto s = apply_czo(hilbert_kernel(), GridFunction(e, v));
    CHECK(std::abs(s[c]) <= 1e-12);
}

TEST_CASE("linearity and commutators") {
    for (int n : {1, 2}) {
        const Domain d(n, 0, n == 1 ? 7 : 3);
        const auto k = kernel_for_dimension(n);
        auto rng = trial_rng(21, n);
        StepOptions opt;
        opt.level = -d.J();
        opt.random_sign = true;
        const auto f = random_step_function(d, rng, opt);
        const auto g = random_step_function(d, rng, opt);
        const auto b = random_step_function(d, rng, opt);
        const Eigen::ArrayXd sum = apply_czo(k, f).values() + apply_czo(k, g).values();
        const auto both = apply_czo(k, GridFunction(d, f.values() + g.values())).values();
        CHECK((both - sum).abs().maxCoeff() <= 1e-12 * sum.abs().maxCoeff());

        CHECK((commutator(k, b, f, 0).values() == apply_czo(k, f).values()).all());
        const Eigen::ArrayXd bf = b.values() * f.values();
        const Eigen::ArrayXd rec = b.values() * apply_czo(k, f).values() - apply_czo(k, GridFunction(d, bf)).values();
        CHECK((commutator(k, b, f, 1).values() - rec).abs().maxCoeff() <= 1e-10);
        for (int m : {1, 2})
            CHECK((commutator(k, GridFunction::constant(d, 3.0), f, m).values() == 0.0).all());

        // second order agrees with the recursion
        const auto t1f = commutator(k, b, f, 1);
        const Eigen::ArrayXd bt1f = b.values() * t1f.values();
        const auto t1bf = commutator(k, b, GridFunction(d, bf), 1);
        const Eigen::ArrayXd rec2 = bt1f - t1bf.values();
        CHECK((commutator(k, b, f, 2).values() - rec2).abs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("fractional integral of an interval") {
    const Domain d(1, 1, 10);
    const auto f = unit_indicator(d);
    const auto I = fractional_integral(0.5, f);
    const Index i = cell_at(d, 0.5);
    CHECK(std::abs(I[i] - 2.0 * 2.0 * std::sqrt(0.5)) <= 1e-3);
    // step functions are integrated exactly
    for (Index c : {Index{100}, Index{2048}, Index{2500}, Index{4000}}) {
        const double x = d.cell_center(c)[0];
        const auto prim = [](double t) { return std::copysign(std::pow(std::abs(t), 0.5) / 0.5, t); };
        const double exact = prim(x) - prim(x - 1.0);
        CHECK(I[c] == doctest::Approx(exact).epsilon(1e-12));
    }
    CHECK((I.values() >= 0.0).all());

    const auto near = from(d, [](double x) { return x >= 0.0 && x < 0.5 ? 1.0 : 0.0; });
    const auto lo = fractional_integral(0.3, near), hi = fractional_integral(0.6, near);
    for (double x : {0.1, 0.25, 0.4}) CHECK(lo[cell_at(d, x)] > hi[cell_at(d, x)]);

    CHECK_THROWS_AS(fractional_integral(1.0, f), PreconditionError);
    CHECK_THROWS_AS(fractional_integral(0.0, f), PreconditionError);
}

TEST_CASE("planar fractional cell weights") {
    const Domain d(2, 0, 1);
    const double diag = fractional_cell_weight(1.0, d, {0, 0}) / 0.5;
    CHECK(diag == doctest::Approx(4.0 * std::log(1.0 + std::sqrt(2.0))).epsilon(1e-12));
    const int M = 400;
    double acc = 0.0;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            const double y0 = 1.0 - 0.5 + (i + 0.5) / M, y1 = 1.0 - 0.5 + (j + 0.5) / M;
            acc += std::pow(std::hypot(y0, y1), -0.5);
        }
    CHECK(fractional_cell_weight(1.5, d, {1, 1}) / std::pow(0.5, 1.5) == doctest::Approx(acc / (M * M)).epsilon(1e-6));

    const Domain e(2, 0, 3);
    auto rng = trial_rng(4, 0);
    StepOptions opt;
    opt.level = -3;
    const auto f = random_step_function(e, rng, opt);
    CHECK((fractional_integral(1.2, f).values() > 0.0).all());
    CHECK((fractional_commutator(1.2, GridFunction::constant(e, 2.0), f, 1).values() == 0.0).all());
}

TEST_CASE("maximal functions") {
    const Domain d(1, 1, 5);
    const CubeUniverse standard{{}, {}, {{0, 0}}};
    CHECK((maximal_plain(GridFunction::constant(d, 1.0)).values() - 1.0).abs().maxCoeff() <= 1e-15);
    const auto m = maximal_plain(unit_indicator(d), standard);
    CHECK(m[cell_at(d, 1.75)] == 0.5);

    auto rng = trial_rng(8, 0);
    StepOptions opt;
    opt.level = -5;
    opt.random_sign = true;
    const auto f = random_step_function(d, rng, opt);
    const auto g = random_step_function(d, rng, opt);
    const auto lhs = maximal_plain(GridFunction(d, f.values() + g.values())).values();
    const Eigen::ArrayXd rhs = maximal_plain(f).values() + maximal_plain(g).values();
    CHECK((lhs <= rhs * (1 + 1e-14)).all());

    const auto p = ExponentFunction::from_expression("2 + 0.5*sin(x1)", d);
    const auto c = GridFunction::constant(d, 3.0);
    CHECK((maximal_norm_avg(c, p).values() - 3.0).abs().maxCoeff() <= 1e-12);
    const auto ng = maximal_norm_avg(f, ExponentFunction::constant(d, 2.0)).values();
    CHECK((ng >= maximal_plain(f).values() * (1 - 1e-12)).all());
    const auto sl = maximal_gphi(GridFunction(d, f.values() + g.values()), GPhiFunction::power(p)).values();
    const Eigen::ArrayXd sr = maximal_gphi(f, GPhiFunction::power(p)).values() + maximal_gphi(g, GPhiFunction::power(p)).values();
    CHECK((sl <= sr * (1 + 1e-12)).all());

    const auto inf = ExponentFunction::constant(d, INFINITY);
    CHECK((maximal_fractional(f, inf, GPhiFunction::power(p)).values() - maximal_gphi(f, GPhiFunction::power(p)).values())
              .abs()
              .maxCoeff() <= 1e-12 * ng.maxCoeff());
}
