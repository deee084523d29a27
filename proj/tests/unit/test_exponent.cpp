#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "varsparse/error.hpp"
#include "varsparse/exponent.hpp"
#include "varsparse/random.hpp"

using namespace varsparse;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExponentFunction piecewise(const Domain& d, double left, double right, std::optional<double> pinf = {}) {
    Eigen::ArrayXd v(d.cell_count());
    for (Index c = 0; c < v.size(); ++c) v[c] = d.cell_center(c)[0] < 0.0 ? left : right;
    return ExponentFunction(GridFunction(d, std::move(v)), pinf);
}

}  // namespace

TEST_CASE("conjugate exponents") {
    const Domain d(1, 0, 4);
    CHECK((conjugate(ExponentFunction::constant(d, 2.0)).values() == 2.0).all());
    CHECK((conjugate(ExponentFunction::constant(d, 3.0)).values() == 1.5).all());
    const auto p = piecewise(d, 2.0, 4.0);
    const auto pc = conjugate(p);
    CHECK(pc.minus() == doctest::Approx(4.0 / 3.0));
    CHECK(pc.plus() == 2.0);
    CHECK(pc.minus() == conjugate_exponent(p.plus()));
    CHECK(pc.plus() == conjugate_exponent(p.minus()));
    CHECK(conjugate_exponent(1.0) == kInf);
    CHECK(conjugate_exponent(kInf) == 1.0);
}

TEST_CASE("conjugation is an involution") {
    const Domain d(1, 1, 6);
    auto rng = trial_rng(11, 0);
    for (int t = 0; t < 10; ++t) {
        auto f = random_step_function(d, rng, {.level = -2, .amp_lo = 1.0, .amp_hi = 8.0});
        const ExponentFunction p(f, 3.0);
        const auto back = conjugate(conjugate(p));
        for (Index c = 0; c < d.cell_count(); ++c) CHECK(back[c] == doctest::Approx(p[c]).epsilon(1e-14));
    }
    Eigen::ArrayXd v(4);
    v << 1.0, kInf, 2.0, 1.0;
    const ExponentFunction p(GridFunction(Domain(1, 0, 1), v));
    const auto back = conjugate(conjugate(p));
    CHECK((back.values() == v).all());
    CHECK(p.has_infinity());
    CHECK(p.is_infinite(1));
}

TEST_CASE("invalid exponent values") {
    const Domain d(1, 0, 2);
    CHECK_THROWS_AS(ExponentFunction::constant(d, 0.5), PreconditionError);
    CHECK_THROWS_AS(ExponentFunction::constant(d, std::nan("")), PreconditionError);
}

TEST_CASE("log-Hoelder diagnostics") {
    const Domain d(1, 2, 6);
    const auto c = check_log_holder(ExponentFunction::constant(d, 2.5));
    CHECK(c.c_local == 0.0);
    CHECK(c.c_global == 0.0);
    CHECK_THROWS_AS(check_log_holder(ExponentFunction(GridFunction::constant(d, 2.0))), PreconditionError);

    const auto p = ExponentFunction::from_expression("1/(1/2 + 1/(4*log(e + abs(x1))))", d, 2.0);
    const auto r = check_log_holder(p);
    CHECK(r.c_global <= 0.25 + 1e-12);
    double brute = 0.0;
    for (Index i = 0; i < d.cell_count(); ++i) {
        const double x = d.cell_center(i)[0];
        brute = std::max(brute, std::fabs(1.0 / p[i] - 0.5) * std::log(std::numbers::e + std::fabs(x)));
    }
    CHECK(r.c_global == brute);
    CHECK(r.c_local > 0.0);
}

TEST_CASE("a jump is not log-Hoelder at the tested scales") {
    auto local = [](int J) {
        const Domain d(1, 0, J);
        return check_log_holder(piecewise(d, 2.0, 4.0, 3.0)).c_local;
    };
    const double a = local(6), b = local(8), c = local(10);
    CHECK(b > a * 1.1);
    CHECK(c > b * 1.1);
    // smooth exponents stay bounded under refinement
    auto smooth = [](int J) {
        const Domain d(1, 0, J);
        return check_log_holder(ExponentFunction::from_expression("2 + sin(x1)", d, 2.0)).c_local;
    };
    CHECK(smooth(10) <= smooth(6) * 1.05 + 1e-12);
}

TEST_CASE("log-log diagnostics") {
    const Domain d(1, 0, 8);
    CHECK(check_loglog(GridFunction::constant(d, 3.0)) == 0.0);
    const double smooth6 = check_loglog(sample("x1", Domain(1, 0, 6)));
    const double smooth9 = check_loglog(sample("x1", Domain(1, 0, 9)));
    CHECK(smooth9 <= smooth6 * 1.05);
    const auto jump = [](int J) {
        const Domain dd(1, 0, J);
        return check_loglog(piecewise(dd, 1.0, 2.0).function());
    };
    CHECK(jump(10) > jump(6));
}

TEST_CASE("reciprocal subtraction") {
    const Domain d(1, 0, 3);
    const auto p = ExponentFunction::constant(d, 2.0), q = ExponentFunction::constant(d, 4.0);
    CHECK((reciprocal_subtract(p, q).values() == 4.0).all());
    CHECK(reciprocal_subtract(p, p).has_infinity());
    CHECK((reciprocal_subtract(p, p).values() == kInf).all());
    const auto b = reciprocal_subtract(p, piecewise(d, 3.0, 4.0));
    for (Index c = 0; c < d.cell_count(); ++c)
        CHECK(b[c] == doctest::Approx(d.cell_center(c)[0] < 0 ? 6.0 : 4.0).epsilon(1e-15));
    CHECK_THROWS_AS(reciprocal_subtract(q, p), PreconditionError);

    auto rng = trial_rng(3, 0);
    for (int t = 0; t < 10; ++t) {
        const auto pp = ExponentFunction(random_step_function(d, rng, {.level = -1, .amp_lo = 1.1, .amp_hi = 3.0}));
        const auto qq = ExponentFunction(GridFunction(d, pp.values() * 1.5 + 0.5));
        const auto back = reciprocal_add(reciprocal_subtract(pp, qq), qq);
        for (Index c = 0; c < d.cell_count(); ++c) CHECK(std::fabs(back[c] - pp[c]) <= 1e-12 * pp[c]);
    }
}

TEST_CASE("scaling") {
    const Domain d(1, 0, 2);
    CHECK((scale(ExponentFunction::constant(d, 2.0), 1.5).values() == 3.0).all());
    const auto p = ExponentFunction::constant(d, 3.0);
    CHECK((scale(p, 1.0 / 3.0).values() == 1.0).all());
    CHECK_THROWS_AS(scale(p, 0.3), PreconditionError);
    CHECK(*scale(ExponentFunction::constant(d, 2.0, 4.0), 2.0).p_inf() == 8.0);
}

TEST_CASE("delta from r") {
    const Domain d(1, 0, 3);
    const auto a = delta_from(ExponentFunction::constant(d, 2.0), 0.9);
    for (Index c = 0; c < d.cell_count(); ++c) CHECK(a[c] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK((delta_from(ExponentFunction::constant(d, 2.0), 0.5).values() == 0.0).all());
    const auto b = delta_from(piecewise(d, 2.0, 2.5), 0.9);
    for (Index c = 0; c < d.cell_count(); ++c)
        CHECK(b[c] == doctest::Approx(d.cell_center(c)[0] < 0 ? 0.4 : 0.5).epsilon(1e-14));
    CHECK_THROWS_AS(delta_from(ExponentFunction::constant(d, 1.5), 0.5), PreconditionError);
    const auto r = exponent_from_delta(a);
    CHECK(r[0] == doctest::Approx(2.5));
    CHECK(exponent_from_delta(GridFunction::constant(d, 0.0)).has_infinity());
}

TEST_CASE("delta from a pair") {
    const Domain d(1, 0, 3);
    const auto v = delta_from_pair(ExponentFunction::constant(d, 2.0), ExponentFunction::constant(d, 2.5), 1);
    CHECK(v[0] == doctest::Approx(0.1));
    const auto w = delta_from_pair(ExponentFunction::constant(d, 1.5), ExponentFunction::constant(d, 6.0), 1, 0.5);
    CHECK(w[0] == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(delta_from_pair(ExponentFunction::constant(d, 3.0), ExponentFunction::constant(d, 2.0), 1),
                    PreconditionError);
}
