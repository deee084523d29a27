#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "varsparse/error.hpp"
#include "varsparse/random.hpp"
#include "varsparse/weights.hpp"

using namespace varsparse;

namespace {

GridFunction from(const Domain& d, double (*g)(double)) {
    Eigen::ArrayXd v(d.cell_count());
    for (Index c = 0; c < v.size(); ++c) v[c] = g(d.cell_center(c)[0]);
    return GridFunction(d, std::move(v));
}

Weight power_weight(const Domain& d, double gamma) {
    Eigen::ArrayXd v(d.cell_count());
    for (Index c = 0; c < v.size(); ++c) v[c] = std::pow(std::abs(d.cell_center(c)[0]), gamma);
    return Weight(GridFunction(d, std::move(v)));
}

}  // namespace

TEST_CASE("weights must be positive") {
    const Domain d(1, 0, 3);
    CHECK_THROWS_AS(Weight(GridFunction::constant(d, 0.0)), PreconditionError);
    const auto w = Weight::from_expression("1 + x1^2", d);
    CHECK((w.inverse().values() * w.values() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("T_infinity constants") {
    const Domain d(1, 0, 5);
    CHECK(t_infty_constant(CubeFunctional::constant(2.0), d).value == 1.0);
    CHECK(t_infty_constant(CubeFunctional::power_measure(0.3), d).value == 1.0);
    const auto vn = t_infty_constant(CubeFunctional::var_norm(GridFunction::constant(d, 0.3)), d);
    CHECK(vn.value == doctest::Approx(1.0).epsilon(1e-12));
    const auto q = *cube_at(d, -2, {40, 0}, {0, 0});
    CHECK(CubeFunctional::var_norm(GridFunction::constant(d, 0.3))(q, d) ==
          doctest::Approx(CubeFunctional::power_measure(0.3)(q, d)).epsilon(1e-12));
}

TEST_CASE("A_p constant of the unit weight") {
    const Domain d(1, 0, 5);
    const Weight one(GridFunction::constant(d, 1.0));
    for (double p : {1.5, 2.0, 3.0}) {
        CHECK(ap_constant(one, ExponentFunction::constant(d, p)).value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(apq_constant(one, ExponentFunction::constant(d, p), ExponentFunction::constant(d, p + 1.0)).value ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("power weights in A_2") {
    const auto p2 = [](int J) { return ExponentFunction::constant(Domain(1, 0, J), 2.0); };
    const auto good = sweep_constant({6, 8, 10}, [&](int J) { return ap_constant(power_weight(Domain(1, 0, J), 0.5), p2(J)).value; });
    CHECK(good.finite);
    CHECK_FALSE(good.divergent);

    // brute force over the standard grid of [-1,1) at J = 6
    const Domain d(1, 0, 6);
    const auto w = power_weight(d, 0.5);
    double best = 0.0;
    for (const auto& q : enumerate_cubes(d, -6, 1, {0, 0})) {
        double a = 0.0, b = 0.0;
        for (Index c : cube_cells(q, d)) {
            a += w.values()[c] * w.values()[c];
            b += 1.0 / (w.values()[c] * w.values()[c]);
        }
        best = std::max(best, std::sqrt(a * d.cell_volume()) * std::sqrt(b * d.cell_volume()) / cube_measure(q, d));
    }
    CHECK(ap_constant(w, p2(6), CubeUniverse{{}, {}, {{0, 0}}}).value == doctest::Approx(best).epsilon(1e-11));

    const auto bad = sweep_constant({6, 8, 10}, [&](int J) { return ap_constant(power_weight(Domain(1, 0, J), 1.5), p2(J)).value; });
    CHECK(bad.divergent);
}

TEST_CASE("A_{p,q} duality") {
    const Domain d(1, 0, 5);
    const auto w = power_weight(d, 0.2);
    const auto p = ExponentFunction::from_expression("2 + 0.3*sin(x1)", d);
    const auto q = ExponentFunction::from_expression("3 + 0.2*cos(x1)", d);
    const double a = apq_constant(w, p, q).value;
    const double b = apq_constant(w.inverse(), conjugate(q), conjugate(p)).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(std::isfinite(a));
}

TEST_CASE("bump constants") {
    const Domain d(1, 0, 5);
    const Weight one(GridFunction::constant(d, 1.0));
    const auto p2 = ExponentFunction::constant(d, 2.0);
    CHECK(bump_constant_power(one, one, p2, 2.0, 2.0, CubeFunctional::constant(1.0), 0).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    const double scan =
        bump_constant_power(one, power_weight(d, 0.5), p2, 2.0, 2.0, CubeFunctional::power_measure(0.3), 1).value;
    CHECK(std::isfinite(scan));
    CHECK_THROWS_AS(bump_constant_power(one, one, ExponentFunction::from_expression("2 + x1", d), 1.0, 2.0,
                                        CubeFunctional::constant(1.0), 0),
                    PreconditionError);

    const auto p = ExponentFunction::from_expression("2 + 0.25*x1", d);
    const double S = 1.5, R = 1.5;
    const auto w = power_weight(d, 0.3);
    const auto a = CubeFunctional::power_measure(0.4);
    const auto v = remark_extremal_weight(w, p, S, a, 1);
    CHECK(bump_constant_power(w, v, p, S, R, a, 1).value <= 1.0 + 1e-12);

    const auto delta = GridFunction::constant(d, 0.2);
    const auto E = GPhiFunction::power_log(scale(p, S), GridFunction::constant(d, 1.0));
    const auto A = GPhiFunction::power(scale(conjugate(p), R));
    const auto vg = remark_extremal_weight(w, E, delta, 1);
    CHECK(bump_constant_gphi(w, vg, E, A, delta, 1).value <= 1.0 + 1e-12);
}

TEST_CASE("openness") {
    const Domain d(1, 0, 4);
    const Weight one(GridFunction::constant(d, 1.0));
    const auto p = ExponentFunction::constant(d, 2.0), q = ExponentFunction::constant(d, 3.0);
    const auto r = openness_exponents(one, p, q);
    CHECK(r.s_smallest < 0.5 + 0.01);
    CHECK(r.r_smallest < 2.0 / 3.0 + 0.01);
    CHECK(r.p_over_u_minus > 1.0);
    CHECK(r.qc_over_vc_minus > 1.0);

    const auto pw = openness_exponents(power_weight(d, 0.3), p, q);
    CHECK(pw.s > 0.5);
    CHECK(pw.s < 1.0);
    CHECK(pw.s_constant <= pw.cap);
    CHECK(pw.p_over_u_minus > 1.0);
    CHECK(pw.qc_over_vc_minus > 1.0);
}

TEST_CASE("symbol norms") {
    const Domain d(1, 0, 6);
    const auto c = GridFunction::constant(d, 2.0);
    const auto zero = GridFunction::constant(d, 0.0);
    const auto one = GridFunction::constant(d, 1.0);
    CHECK(lipschitz_a_norm(c, CubeFunctional::constant(1.0)).value == 0.0);
    CHECK(bmo_eta_delta_norm(c, one, zero).value == 0.0);

    const auto half = from(d, [](double x) { return x >= 0.0 && x < 0.5 ? 1.0 : 0.0; });
    const auto bmo = lipschitz_a_norm(half, CubeFunctional::constant(1.0));
    CHECK(bmo.value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(bmo_eta_delta_norm(half, one, zero).value == doctest::Approx(bmo.value).epsilon(1e-14));

    const auto x = from(d, [](double t) { return t; });
    CHECK(std::isfinite(bmo_eta_delta_norm(x, one, GridFunction::constant(d, 0.5)).value));
    CHECK(std::isfinite(lipschitz_a_norm(x, CubeFunctional::var_norm(GridFunction::constant(d, 0.5))).value));

    CHECK(symbol_pointwise_scan(c, GridFunction::constant(d, 0.4)).value == 0.0);
    const auto sweep = sweep_constant({6, 8, 10}, [](int J) {
        const Domain dj(1, 0, J);
        const auto b = from(dj, [](double t) { return std::pow(std::abs(t), 0.4); });
        return symbol_pointwise_scan(b, GridFunction::constant(dj, 0.4), CubeUniverse{{}, {}, {{0, 0}}}).value;
    });
    CHECK_FALSE(sweep.divergent);

    const auto p = ExponentFunction::constant(d, 2.0);
    for (int k : {1, 2}) CHECK(std::isfinite(izuki_ratio(x, CubeFunctional::power_measure(1.0), p, k).value));
}

TEST_CASE("sweep verdicts") {
    const auto flat = sweep_constant({6, 8, 10}, [](int) { return 3.0; });
    CHECK_FALSE(flat.divergent);
    CHECK(flat.max_growth == 1.0);
    const auto grow = sweep_constant({6, 8, 10}, [](int J) { return std::pow(1.5, J / 2.0); });
    CHECK(grow.divergent);
    const auto slow = sweep_constant({6, 7, 8}, [](int J) { return std::pow(1.2, J); });
    CHECK_FALSE(slow.divergent);
}
