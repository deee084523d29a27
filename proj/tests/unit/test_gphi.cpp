#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "varsparse/error.hpp"
#include "varsparse/gphi.hpp"
#include "varsparse/random.hpp"

using namespace varsparse;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// the unit interval [0,1) inside [-1,1)
DyadicCube unit(const Domain& d) { return *cube_at(d, 0, {d.cells_per_axis() / 2, 0}, {0, 0}); }

ExponentFunction piecewise(const Domain& d, double left, double right) {
    Eigen::ArrayXd v(d.cell_count());
    for (Index c = 0; c < v.size(); ++c) v[c] = d.cell_center(c)[0] < 0.5 ? left : right;
    return ExponentFunction(GridFunction(d, std::move(v)));
}

}  // namespace

TEST_CASE("modular examples") {
    const Domain d(1, 0, 4);
    const auto q = unit(d);
    const auto chi = indicator(q, d);
    CHECK(modular(GPhiFunction::power(ExponentFunction::constant(d, 2.0)), chi, 1.0) == 1.0);
    const auto psi = GPhiFunction::power(piecewise(d, 2.0, 4.0));
    CHECK(modular(psi, GridFunction(d, chi.values() * 2.0), 2.0) == 1.0);
    CHECK(modular(GPhiFunction::linear_log(d), chi, 1.0) == doctest::Approx(std::log(std::numbers::e + 1.0)));
    CHECK(modular(GPhiFunction::linear_log(d), chi, 1.0) == doctest::Approx(1.31326).epsilon(1e-5));
}

TEST_CASE("Luxemburg norm examples") {
    const Domain d(1, 0, 6);
    const auto q = unit(d);
    const auto chi = indicator(q, d);
    CHECK(luxemburg_norm(GPhiFunction::power(ExponentFunction::constant(d, 2.0)), chi) ==
          doctest::Approx(1.0).epsilon(1e-13));
    // Psi(x,1) = 1 everywhere: ||c chi_Q|| = c for |Q| = 1
    for (double c : {0.3, 1.0, 7.5}) {
        const GridFunction f(d, chi.values() * c);
        CHECK(luxemburg_norm(GPhiFunction::power(piecewise(d, 1.5, 3.5)), f) == doctest::Approx(c).epsilon(1e-12));
        const auto pl = GPhiFunction::power_log(piecewise(d, 1.5, 3.5), GridFunction::constant(d, 0.0));
        CHECK(luxemburg_norm(pl, f) == doctest::Approx(c).epsilon(1e-12));
    }
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(d.cell_count());
    for (Index c = 0; c < d.cell_count(); ++c) {
        const double x = d.cell_center(c)[0];
        if (x >= 0.0 && x < 0.5) v[c] = 2.0;
    }
    CHECK(luxemburg_norm(GPhiFunction::power(piecewise(d, 2.0, 4.0)), v) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(luxemburg_norm(GPhiFunction::linear_log(d), Eigen::ArrayXd::Zero(d.cell_count())) == 0.0);
}

TEST_CASE("infinite branch acts as a floor") {
    const Domain d(1, 0, 3);
    Eigen::ArrayXd p = Eigen::ArrayXd::Constant(d.cell_count(), 2.0);
    p[0] = kInf;
    const auto psi = GPhiFunction::power(ExponentFunction(GridFunction(d, p)));
    CHECK(psi.has_infinite_branch());
    Eigen::ArrayXd f = Eigen::ArrayXd::Zero(d.cell_count());
    f[0] = 5.0;
    CHECK(luxemburg_norm(psi, f) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(modular(psi, f, 4.9) == kInf);
    CHECK(modular(psi, f, 5.0) == 0.0);
    f[1] = 1e-3;
    CHECK(luxemburg_norm(psi, f) == doctest::Approx(5.0).epsilon(1e-14));
    f[1] = 1e3;  // the finite part dominates
    const double n = luxemburg_norm(psi, f);
    CHECK(n == doctest::Approx(1e3 * std::sqrt(d.cell_volume())).epsilon(1e-12));
}

TEST_CASE("norm and modular are dual") {
    const Domain d(1, 1, 7);
    auto rng = trial_rng(5, 0);
    for (int t = 0; t < 30; ++t) {
        const auto p = ExponentFunction(random_step_function(d, rng, {.level = -1, .amp_lo = 1.0, .amp_hi = 5.0}));
        const auto f = random_step_function(d, rng, {.level = -4, .amp_lo = 1e-3, .amp_hi = 1e3,
                                                     .zero_probability = 0.3});
        for (const auto& psi : {GPhiFunction::power(p), GPhiFunction::power_log(p, GridFunction::constant(d, 1.5)),
                                GPhiFunction::linear_log(d)}) {
            const double n = luxemburg_norm(psi, f);
            if (n == 0.0) continue;
            CHECK(modular(psi, f, n) <= 1.0 + 1e-8);
            const double below = modular(psi, f, n * (1.0 - 1e-6));
            if (std::isfinite(below)) CHECK(below > 1.0);
        }
        const double c = uniform(rng, 0.1, 20.0);
        const auto psi = GPhiFunction::power(p);
        const double a = luxemburg_norm(psi, GridFunction(d, f.values() * c)), b = c * luxemburg_norm(psi, f);
        CHECK(std::fabs(a - b) <= 1e-9 * b);
    }
}

TEST_CASE("weighted norms") {
    const Domain d(1, 0, 5);
    auto rng = trial_rng(9, 0);
    const auto p = ExponentFunction(random_step_function(d, rng, {.level = -1, .amp_lo = 1.2, .amp_hi = 4.0}));
    const auto psi = GPhiFunction::power(p);
    const auto f = random_step_function(d, rng, {.level = -3});
    CHECK(weighted_norm(psi, f, GridFunction::constant(d, 1.0)) == luxemburg_norm(psi, f));
    CHECK(weighted_norm(psi, f, GridFunction::constant(d, 3.0)) ==
          doctest::Approx(3.0 * luxemburg_norm(psi, f)).epsilon(1e-12));
    const auto w = random_step_function(d, rng, {.level = -2});
    CHECK(weighted_norm(psi, f, w) == luxemburg_norm(psi, GridFunction(d, f.values() * w.values())));
}

TEST_CASE("power conjugates in closed form") {
    const Domain d(1, 0, 2);
    const auto two = conjugate_gphi(GPhiFunction::power(ExponentFunction::constant(d, 2.0)));
    CHECK(two.kind() == GPhiKind::Power);
    CHECK(two(0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(two(0, 3.0) == doctest::Approx(2.25).epsilon(1e-15));
    const auto one = conjugate_gphi(GPhiFunction::power(ExponentFunction::constant(d, 1.0)));
    CHECK(one(0, 0.5) == 0.0);
    CHECK(one(0, 1.0) == 0.0);
    CHECK(one(0, 1.0 + 1e-12) == kInf);
    const auto back = conjugate_gphi(one);
    CHECK(back(0, 3.0) == 3.0);
    // Legendre oracle for t^p: sup_t (tu - t^p) = (p-1) (u/p)^{p'}
    const auto p3 = conjugate_gphi(GPhiFunction::power(ExponentFunction::constant(d, 3.0)));
    for (double u : {0.1, 1.0, 4.0}) CHECK(p3(0, u) == doctest::Approx(2.0 * std::pow(u / 3.0, 1.5)).epsilon(1e-14));
}

TEST_CASE("numeric conjugate of t log(e+t) satisfies Young") {
    const Domain d(1, 0, 1);
    const auto psi = GPhiFunction::linear_log(d);
    const auto star = conjugate_gphi(psi);
    CHECK(star.kind() == GPhiKind::Numeric);
    CHECK(star(0, 0.5) == 0.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            const double t = std::pow(10.0, -2.0 + 4.0 * i / 99.0);
            const double u = std::pow(10.0, -2.0 + 3.3 * j / 99.0);
            worst = std::max(worst, (t * u - psi(0, t) - star(0, u)) / std::max(1.0, t * u));
        }
    CHECK(worst <= 1e-7);
    // tight at the nodes, interpolated between them
    for (double u : {2.0, 3.0}) {
        double best = 0.0;
        for (int i = 1; i < 200000; ++i) {
            const double t = i * 1e-3;
            best = std::max(best, t * u - psi(0, t));
        }
        CHECK(star(0, u) >= best * (1.0 - 1e-9));
        CHECK(star(0, u) == doctest::Approx(best).epsilon(u == 2.0 ? 1e-7 : 1e-3));
    }
}

TEST_CASE("numeric conjugate of a variable power-log") {
    const Domain d(1, 0, 2);
    const auto psi = GPhiFunction::power_log(piecewise(d, 2.0, 3.0), GridFunction::constant(d, 1.0));
    const auto star = conjugate_gphi(psi);
    CHECK(star.profile_count() == 2);
    CHECK(phi_axiom_defect(star) == 0.0);
    for (Index c = 0; c < d.cell_count(); ++c)
        for (double t : {0.01, 0.7, 3.0, 40.0})
            for (double u : {0.05, 1.0, 9.0}) CHECK(t * u <= psi(c, t) + star(c, u) + 1e-9 * t * u);
}

TEST_CASE("generalised inverse") {
    const Domain d(1, 0, 2);
    const auto two = GPhiFunction::power(ExponentFunction::constant(d, 2.0));
    CHECK(inverse_gphi(two, 0, 4.0) == 2.0);
    CHECK(inverse_gphi(two, 0, 0.0) == 0.0);
    const auto ll = GPhiFunction::linear_log(d);
    CHECK(inverse_gphi(ll, 0, std::log(std::numbers::e + 1.0)) == doctest::Approx(1.0).epsilon(1e-10));
    const auto tab = GPhiFunction::tabulate(ll);
    CHECK(inverse_gphi(tab, 0, tab(0, 1.0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("tabulated functions") {
    const Domain d(1, 0, 3);
    const auto psi = GPhiFunction::power(piecewise(d, 1.5, 3.0));
    const auto tab = GPhiFunction::tabulate(psi);
    CHECK(GPhiFunction::numeric_nodes()[256] == 1.0);
    CHECK(tab(0, 1.0) == 1.0);
    CHECK(tab(7, 1.0) == 1.0);
    for (double t : {1e-6, 0.3, 2.0, 1e6})
        for (Index c : {0, 7}) CHECK(tab(c, t) >= psi(c, t) * (1.0 - 1e-15));
    CHECK(phi_axiom_defect(tab) == 0.0);
    const auto chi = indicator(unit(d), d);
    CHECK(luxemburg_norm(tab, GridFunction(d, chi.values() * 2.5)) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(GPhiFunction::numeric(d, {std::vector<double>(3, 0.0)}, std::vector<std::int32_t>(8, 0)),
                    PreconditionError);
}

TEST_CASE("Hoelder inequality for Psi and its conjugate") {
    const Domain d(1, 1, 6);
    auto rng = trial_rng(17, 0);
    for (int t = 0; t < 40; ++t) {
        const auto p = ExponentFunction(random_step_function(d, rng, {.level = 0, .amp_lo = 1.05, .amp_hi = 6.0}));
        const auto psi = t % 2 ? GPhiFunction::power(p) : GPhiFunction::power_log(p, GridFunction::constant(d, 0.5));
        const auto star = conjugate_gphi(psi);
        const auto f = random_step_function(d, rng, {.level = -3, .random_sign = true});
        const auto g = random_step_function(d, rng, {.level = -4});
        const double lhs = integrate(GridFunction(d, (f.values() * g.values()).abs()));
        CHECK(lhs <= 2.0 * luxemburg_norm(psi, f) * luxemburg_norm(star, g));
    }
}

TEST_CASE("condition F constants") {
    const Domain d(1, 1, 6);
    const auto shifts = all_shifts(1);
    const auto two = GPhiFunction::power(ExponentFunction::constant(d, 2.0));
    const auto one = GPhiFunction::power(ExponentFunction::constant(d, 1.0));
    const auto r = check_condition_F(two, two, one, -6, 2, shifts);
    CHECK(r.c2 == doctest::Approx(1.0).epsilon(1e-14));

    // t^4 log(e+t)^4, t^{4/3}, t log(e+t)
    const auto A1 = GPhiFunction::power_log(ExponentFunction::constant(d, 4.0), GridFunction::constant(d, 4.0));
    const auto B1 = GPhiFunction::power(ExponentFunction::constant(d, 4.0 / 3.0));
    const auto D1 = GPhiFunction::linear_log(d);
    const auto r1 = check_condition_F(A1, B1, D1, -6, 2, shifts);
    for (double c : {r1.c1, r1.c2, r1.c3}) {
        CHECK(std::isfinite(c));
        CHECK(c > 0.0);
    }
    CHECK(r1.c2 < 10.0);
    CHECK(!r1.c1_witness.empty());

    // mu = 6, sigma p' = 4, nu = 1, 1/alpha = 1/mu + 1/(sigma p')'
    const double alpha = 1.0 / (1.0 / 6.0 + 0.75);
    const auto A2 = GPhiFunction::power_log(ExponentFunction::constant(d, 6.0), GridFunction::constant(d, 6.0));
    const auto D2 = GPhiFunction::power_log(ExponentFunction::constant(d, alpha), GridFunction::constant(d, alpha));
    const auto r2 = check_condition_F(A2, B1, D2, -6, 2, shifts);
    for (double c : {r2.c1, r2.c2, r2.c3}) CHECK(std::isfinite(c));
    CHECK(r2.c2 < 10.0);
}
