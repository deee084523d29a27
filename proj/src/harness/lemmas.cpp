#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "common.hpp"
#include "varsparse/error.hpp"
#include "varsparse/gphi.hpp"
#include "varsparse/harness/suites.hpp"
#include "varsparse/operators.hpp"
#include "varsparse/parallel.hpp"
#include "varsparse/sparse.hpp"
#include "varsparse/weights.hpp"

namespace varsparse {

namespace {

using detail::row;
using detail::trial_witness;
using Suite = std::function<Report(const ExperimentConfig&)>;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> default_sweep(const ExperimentConfig& c) {
    return detail::sweep_or(c, c.n == 1 ? std::vector<int>{6, 8, 10} : std::vector<int>{3, 4, 5});
}

GridFunction map(const GridFunction& f, const std::function<double(double)>& g) {
    return GridFunction(f.domain(), f.values().unaryExpr(g));
}

GridFunction times(const GridFunction& a, const GridFunction& b) {
    return GridFunction(a.domain(), a.values() * b.values());
}

/// Worst (largest) value over trials, keeping the first attaining trial.
struct TrialMax {
    double value = -kInf;
    std::size_t trial = 0;
    void take(const std::vector<double>& v) {
        for (std::size_t t = 0; t < v.size(); ++t)
            if (v[t] > value || std::isnan(v[t])) {
                value = v[t];
                trial = t;
                if (std::isnan(v[t])) return;
            }
    }
};

template <class F>
std::vector<double> run_trials(int trials, F&& body) {
    std::vector<double> out(static_cast<std::size_t>(trials));
    parallel_for(trials, [&](std::int64_t t) { out[static_cast<std::size_t>(t)] = body(static_cast<std::uint64_t>(t)); });
    return out;
}

struct CubeExtremes {
    double min = kInf, max = -kInf;
    std::string min_id, max_id;
};

CubeExtremes cube_extremes(const Domain& dom, const std::function<double(const DyadicCube&)>& g) {
    const auto cubes = cube_universe(dom);
    std::vector<double> v(cubes.size());
    parallel_for(static_cast<std::int64_t>(cubes.size()),
                 [&](std::int64_t i) { v[static_cast<std::size_t>(i)] = g(cubes[static_cast<std::size_t>(i)]); });
    CubeExtremes e;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        if (v[i] < e.min) {
            e.min = v[i];
            e.min_id = cube_id(cubes[i], dom.dim());
        }
        if (v[i] > e.max) {
            e.max = v[i];
            e.max_id = cube_id(cubes[i], dom.dim());
        }
    }
    return e;
}

double closed_form_lp(const GridFunction& f, double p) {
    const Eigen::ArrayXd t = f.values().abs().pow(p);
    return std::pow(pairwise_sum({t.data(), static_cast<std::size_t>(t.size())}) * f.domain().cell_volume(), 1.0 / p);
}

Report constant_exponent(const ExperimentConfig& c) {
    const std::string id = "constant_exponent";
    const Domain dom = c.domain();
    const int trials = c.trials_or(100);
    const double tol = c.tolerance(id, 1e-8);
    Report r;
    for (double p : {1.5, 2.0, 3.0}) {
        const auto psi = GPhiFunction::power(ExponentFunction::constant(dom, p));
        TrialMax worst;
        worst.take(run_trials(trials, [&](std::uint64_t t) {
            auto rng = trial_rng(c.seed, t);
            const auto f = detail::random_test_function(dom, rng, true);
            const double exact = closed_form_lp(f, p);
            return std::abs(luxemburg_norm(psi, f) - exact) / exact;
        }));
        r.add(row(id, "p=" + format_number(p) + " relative error", worst.value, trial_witness(worst.trial), dom.J(),
                  c.seed, worst.value <= tol));
    }
    return r;
}

Report unit_modular(const ExperimentConfig& c) {
    const std::string id = "unit_modular";
    const Domain dom = c.domain();
    const double tol = c.tolerance(id, 1e-9);
    const auto p = c.exponent("p", "2 + 0.5*sin(3*x1)", dom);
    const auto& nodes = GPhiFunction::numeric_nodes();
    std::vector<double> table(nodes.size());
    const double norm1 = std::log(std::exp(1.0) + 1.0);
    for (std::size_t k = 0; k < nodes.size(); ++k)
        table[k] = nodes[k] * std::log(std::exp(1.0) + nodes[k]) / norm1;

    const std::vector<std::pair<std::string, GPhiFunction>> families{
        {"power", GPhiFunction::power(p)},
        {"power unit coefficient", GPhiFunction::power(p, Eigen::ArrayXd::Ones(dom.cell_count()))},
        {"power_log q=0", GPhiFunction::power_log(p, GridFunction::constant(dom, 0.0))},
        {"tabulated power", GPhiFunction::tabulate(GPhiFunction::power(p))},
        {"numeric normalized t log(e+t)",
         GPhiFunction::numeric(dom, {table}, std::vector<std::int32_t>(static_cast<std::size_t>(dom.cell_count()), 0))},
    };
    DyadicCube unit;
    unit.level = 0;
    unit.side = Index{1} << dom.J();
    unit.corner = {dom.cells_per_axis() / 2, dom.dim() == 2 ? dom.cells_per_axis() / 2 : 0};
    Report r;
    for (const auto& [name, psi] : families) {
        double worst = 0.0;
        std::string witness;
        for (double level : {0.5, 1.0, 3.7}) {
            const Eigen::ArrayXd v = level * indicator(unit, dom).values();
            const double err = std::abs(luxemburg_norm(psi, v) - level) / level;
            if (err > worst || witness.empty()) {
                worst = err;
                witness = "c=" + format_number(level);
            }
        }
        r.add(row(id, name, worst, witness, dom.J(), c.seed, worst <= tol));
    }
    return r;
}

Report lemma_326(const ExperimentConfig& c) {
    const std::string id = "lemma_326";
    const Domain dom = c.domain();
    const int trials = c.trials_or(100);
    const double tol = c.tolerance(id, 1e-7);
    TrialMax worst;
    worst.take(run_trials(trials, [&](std::uint64_t t) {
        auto rng = trial_rng(c.seed, t);
        StepOptions po;
        po.level = detail::uniform_int(rng, -dom.J(), dom.L());
        po.amp_lo = 1.1;
        po.amp_hi = 4.0;
        const ExponentFunction p(random_step_function(dom, rng, po));
        const double s = uniform(rng, 1.0 / p.minus(), 3.0);
        const auto f = detail::random_test_function(dom, rng, true);
        const double lhs = lp_norm(p, map(f, [s](double x) { return std::pow(std::abs(x), s); }));
        const double rhs = std::pow(lp_norm(scale(p, s), f), s);
        return std::abs(lhs - rhs) / rhs;
    }));
    Report r;
    r.add(row(id, "max relative defect", worst.value, trial_witness(worst.trial), dom.J(), c.seed,
              worst.value <= tol));
    return r;
}

/// int |f g| / (||f||_A ||g||_B) over random signed pairs.
std::vector<double> holder_ratios(const ExperimentConfig& c, const Domain& dom, const GPhiFunction& A,
                                  const GPhiFunction& B, int trials) {
    return run_trials(trials, [&](std::uint64_t t) {
        auto rng = trial_rng(c.seed, t);
        const auto f = detail::random_test_function(dom, rng, true, 0.3);
        const auto g = detail::random_test_function(dom, rng, true, 0.3);
        const double fg = integrate(f.values().abs() * g.values().abs(), dom);
        return fg / (luxemburg_norm(A, f) * luxemburg_norm(B, g));
    });
}

Report holder_pp(const ExperimentConfig& c) {
    const std::string id = "holder_pp";
    const Domain dom = c.domain();
    const int trials = c.trials_or(1000);
    const auto p = c.exponent("p", "2 + 0.8*sin(2*x1)", dom);
    Report r;
    TrialMax worst;
    worst.take(holder_ratios(c, dom, GPhiFunction::power(p), GPhiFunction::power(conjugate(p)), trials));
    const double bound = c.tolerance("holder", 2.0);
    r.add(row(id, "variable p ratio", worst.value, trial_witness(worst.trial), dom.J(), c.seed, worst.value <= bound));

    const auto two = ExponentFunction::constant(dom, 2.0);
    TrialMax exact;
    exact.take(holder_ratios(c, dom, GPhiFunction::power(two), GPhiFunction::power(two), trials));
    r.add(row(id, "p=2 ratio", exact.value, trial_witness(exact.trial), dom.J(), c.seed,
              exact.value <= 1.0 + c.tolerance("holder_exact", 1e-12)));
    return r;
}

Report holder_musielak(const ExperimentConfig& c) {
    const std::string id = "holder_musielak";
    const Domain dom = c.domain();
    const int trials = c.trials_or(1000);
    const double bound = c.tolerance("holder", 2.0);
    const auto p = c.exponent("p", "2 + 0.5*sin(2*x1)", dom);
    const auto lp = c.sample_expression("log_power", "1", dom);
    const std::vector<std::pair<std::string, GPhiFunction>> families{
        {"t log(e+t)", GPhiFunction::linear_log(dom)},
        {"t^p log(e+t)^q", GPhiFunction::power_log(p, lp)},
    };
    Report r;
    for (const auto& [name, psi] : families) {
        TrialMax worst;
        worst.take(holder_ratios(c, dom, psi, conjugate_gphi(psi), trials));
        r.add(row(id, name + " ratio", worst.value, trial_witness(worst.trial), dom.J(), c.seed, worst.value <= bound));
    }
    return r;
}

/// ||chi_Q||_p ||chi_Q||_p' / |Q|.
double norm_product_at(const GPhiFunction& P, const GPhiFunction& Pc, const DyadicCube& q, const Domain& dom) {
    return indicator_norm(P, q) * indicator_norm(Pc, q) / cube_measure(q, dom);
}

/// Ratio of the largest to smallest per-J value, for both extremes.
void add_extreme_stability(Report& r, const std::string& id, const std::string& what, const std::vector<int>& Js,
                           const std::vector<CubeExtremes>& ext, const ExperimentConfig& c) {
    double lo_min = kInf, lo_max = 0.0, hi_min = kInf, hi_max = 0.0;
    for (const auto& e : ext) {
        lo_min = std::min(lo_min, e.min);
        lo_max = std::max(lo_max, e.min);
        hi_min = std::min(hi_min, e.max);
        hi_max = std::max(hi_max, e.max);
    }
    const double factor = std::max(lo_max / lo_min, hi_max / hi_min);
    std::string js;
    for (int J : Js) js += (js.empty() ? "J=" : ",") + std::to_string(J);
    r.add(row(id, what + " stability of extremes", factor, js, Js.back(), c.seed,
              std::isfinite(factor) && factor <= c.tolerance("norm_product", 1.5)));
}

Report norm_product(const ExperimentConfig& c) {
    const std::string id = "norm_product";
    const auto Js = default_sweep(c);
    Report r;
    std::vector<CubeExtremes> ext;
    double const_err = 0.0;
    std::string const_witness;
    int const_J = Js.front();
    for (int J : Js) {
        const Domain dom = c.domain(J);
        const auto p = c.exponent("p", "2 + 0.5*sin(2*x1)", dom);
        const auto P = GPhiFunction::power(p), Pc = GPhiFunction::power(conjugate(p));
        const auto e = cube_extremes(dom, [&](const DyadicCube& q) { return norm_product_at(P, Pc, q, dom); });
        r.add(row(id, "min over cubes", e.min, e.min_id, J, c.seed, std::isfinite(e.min) && e.min > 0.0));
        r.add(row(id, "max over cubes", e.max, e.max_id, J, c.seed, std::isfinite(e.max)));
        ext.push_back(e);

        for (double pc : {1.5, 2.5}) {
            const auto Q = ExponentFunction::constant(dom, pc);
            const auto A = GPhiFunction::power(Q), B = GPhiFunction::power(conjugate(Q));
            const auto ce = cube_extremes(dom, [&](const DyadicCube& q) {
                return std::abs(norm_product_at(A, B, q, dom) - 1.0);
            });
            if (ce.max > const_err || const_witness.empty()) {
                const_err = ce.max;
                const_witness = "p=" + format_number(pc) + " " + ce.max_id;
                const_J = J;
            }
        }
    }
    add_extreme_stability(r, id, "variable p", Js, ext, c);
    r.add(row(id, "constant p |product - 1|", const_err, const_witness, const_J, c.seed,
              const_err <= c.tolerance("norm_product_constant", 1e-10)));
    return r;
}

struct PqPair {
    ExponentFunction p, q, beta;
};

PqPair pq_pair(const ExperimentConfig& c, const Domain& dom) {
    auto p = c.exponent("p", "1.5 + 0.2*sin(2*x1)", dom);
    auto q = c.exponent("q", "3 + 0.3*cos(2*x1)", dom);
    auto beta = reciprocal_subtract(p, q);
    return {std::move(p), std::move(q), std::move(beta)};
}

Report equivalence_beta(const ExperimentConfig& c) {
    const std::string id = "equivalence_beta";
    const auto Js = default_sweep(c);
    Report r;
    std::vector<CubeExtremes> ext;
    for (int J : Js) {
        const Domain dom = c.domain(J);
        const auto e3 = pq_pair(c, dom);
        const auto P = GPhiFunction::power(e3.p), Q = GPhiFunction::power(e3.q), B = GPhiFunction::power(e3.beta);
        const auto e = cube_extremes(dom, [&](const DyadicCube& cube) {
            return indicator_norm(P, cube) / (indicator_norm(B, cube) * indicator_norm(Q, cube));
        });
        r.add(row(id, "min ||chi_Q||_p / (||chi_Q||_beta ||chi_Q||_q)", e.min, e.min_id, J, c.seed,
                  std::isfinite(e.min) && e.min > 0.0));
        r.add(row(id, "max ||chi_Q||_p / (||chi_Q||_beta ||chi_Q||_q)", e.max, e.max_id, J, c.seed,
                  e.max <= 2.0 * (1.0 + 1e-10)));
        ext.push_back(e);
    }
    add_extreme_stability(r, id, "ratio", Js, ext, c);
    return r;
}

Report averages(const ExperimentConfig& c) {
    const std::string id = "averages";
    const Domain dom = c.domain();
    const int trials = c.trials_or(20);
    const auto e3 = pq_pair(c, dom);
    const auto P = GPhiFunction::power(e3.p), Q = GPhiFunction::power(e3.q), B = GPhiFunction::power(e3.beta);
    const auto cubes = cube_universe(dom);
    std::vector<double> bound(cubes.size());
    parallel_for(static_cast<std::int64_t>(cubes.size()), [&](std::int64_t i) {
        const auto& q = cubes[static_cast<std::size_t>(i)];
        bound[static_cast<std::size_t>(i)] = 2.0 * indicator_norm(B, q) * indicator_norm(Q, q) / indicator_norm(P, q);
    });
    double bmax = 0.0;
    for (double b : bound) bmax = std::max(bmax, b);

    std::vector<std::size_t> where(static_cast<std::size_t>(trials));
    std::vector<double> ratio_max(static_cast<std::size_t>(trials));
    const auto excess = run_trials(trials, [&](std::uint64_t t) {
        auto rng = trial_rng(c.seed, t);
        const auto f = detail::random_test_function(dom, rng, true, 0.3);
        double worst = -kInf, rmax = 0.0;
        for (std::size_t i = 0; i < cubes.size(); ++i) {
            const double nq = cube_norm(Q, f.values(), cubes[i]);
            if (nq == 0.0) continue;
            const double ratio = (cube_norm(P, f.values(), cubes[i]) / indicator_norm(P, cubes[i])) /
                                 (nq / indicator_norm(Q, cubes[i]));
            rmax = std::max(rmax, ratio);
            if (ratio / bound[i] > worst) {
                worst = ratio / bound[i];
                where[t] = i;
            }
        }
        ratio_max[t] = rmax;
        return worst;
    });
    TrialMax worst;
    worst.take(excess);
    Report r;
    r.add(row(id, "fitted constant 2 max ||chi_Q||_beta ||chi_Q||_q / ||chi_Q||_p", bmax, "", dom.J(), c.seed,
              std::isfinite(bmax)));
    r.add(row(id, "max average ratio p over q", *std::max_element(ratio_max.begin(), ratio_max.end()), "", dom.J(),
              c.seed, true));
    r.add(row(id, "max ratio / per-cube Hoelder bound", worst.value,
              trial_witness(worst.trial) + " " + cube_id(cubes[where[worst.trial]], dom.dim()), dom.J(), c.seed,
              worst.value <= 1.0 + 1e-10));
    return r;
}

/// (||chi_Q w||_A / ||chi_Q||_A)(||chi_Q w^-1||_B / ||chi_Q||_B).
double average_product(const GPhiFunction& A, const GPhiFunction& B, const Weight& w, const Weight& winv,
                       const DyadicCube& q) {
    return (cube_norm(A, w.values(), q) / indicator_norm(A, q)) *
           (cube_norm(B, winv.values(), q) / indicator_norm(B, q));
}

Report apq_properties(const ExperimentConfig& c) {
    const std::string id = "apq_properties";
    const Domain dom = c.domain();
    const auto e3 = pq_pair(c, dom);
    const Weight w(c.sample_expression("w", "abs(x1)^0.2", dom));
    const Weight winv = w.inverse();
    const auto pc = conjugate(e3.p), qc = conjugate(e3.q);
    const auto P = GPhiFunction::power(e3.p), Q = GPhiFunction::power(e3.q), B = GPhiFunction::power(e3.beta);
    const auto Pc = GPhiFunction::power(pc), Qc = GPhiFunction::power(qc);

    const auto ap = ap_constant(w, e3.p);
    const auto aq = ap_constant(w, e3.q);
    const auto apq = apq_constant(w, e3.p, e3.q);
    Report r;
    r.add(row(id, "[w]_A_p", ap.value, ap.witness_id, dom.J(), c.seed, std::isfinite(ap.value)));
    r.add(row(id, "[w]_A_q", aq.value, aq.witness_id, dom.J(), c.seed, std::isfinite(aq.value)));
    r.add(row(id, "[w]_A_pq", apq.value, apq.witness_id, dom.J(), c.seed, std::isfinite(apq.value)));

    // A_p(Q) <= 2 K_beta(Q) prod_p(Q) A_pq(Q), with prod_p(Q) = ||chi_Q||_p ||chi_Q||_p' / |Q|.
    const auto chain = cube_extremes(dom, [&](const DyadicCube& q) {
        const double ap_q = cube_norm(P, w.values(), q) * cube_norm(Pc, winv.values(), q) / cube_measure(q, dom);
        const double kbeta = indicator_norm(B, q) * indicator_norm(Q, q) / indicator_norm(P, q);
        const double prod = indicator_norm(P, q) * indicator_norm(Pc, q) / cube_measure(q, dom);
        return ap_q / (2.0 * kbeta * prod * average_product(Q, Pc, w, winv, q));
    });
    r.add(row(id, "A_p chain ratio", chain.max, chain.max_id, dom.J(), c.seed, chain.max <= 1.0 + 1e-10));

    // mixed(Q) <= K_beta(Q) (||chi_Q w||_q / ||chi_Q||_q)(||chi_Q w^-1||_q' / ||chi_Q||_q').
    const auto mixed_chain = cube_extremes(dom, [&](const DyadicCube& q) {
        const double kbeta = 2.0 * indicator_norm(B, q) * indicator_norm(Q, q) / indicator_norm(P, q);
        return average_product(P, Qc, w, winv, q) / (kbeta * average_product(Q, Qc, w, winv, q));
    });
    r.add(row(id, "mixed product chain ratio", mixed_chain.max, mixed_chain.max_id, dom.J(), c.seed,
              mixed_chain.max <= 1.0 + 1e-10));
    const auto mixed = cube_extremes(dom, [&](const DyadicCube& q) { return average_product(P, Qc, w, winv, q); });
    r.add(row(id, "min mixed product", mixed.min, mixed.min_id, dom.J(), c.seed,
              std::isfinite(mixed.min) && mixed.min > 0.0));
    r.add(row(id, "max mixed product / ([w]_A_pq [w]_A_q)", mixed.max / (apq.value * aq.value), mixed.max_id, dom.J(),
              c.seed, std::isfinite(mixed.max)));
    return r;
}

Report factores(const ExperimentConfig& c) {
    const std::string id = "factores";
    const Domain dom = c.domain();
    const double tol = c.tolerance(id, 1e-10);
    const int m = c.order(2);
    const auto e3 = pq_pair(c, dom);
    const auto Q = GPhiFunction::power(e3.q), Pc = GPhiFunction::power(conjugate(e3.p));
    const Weight mu(c.sample_expression("mu", "abs(x1)^0.2", dom));
    const Weight lambda(c.sample_expression("lambda", "abs(x1)^(-0.1)", dom));
    const auto lam = apq_constant(lambda, e3.p, e3.q);
    const auto muc = apq_constant(mu, e3.p, e3.q);
    Report r;
    r.add(row(id, "[lambda]_A_pq", lam.value, lam.witness_id, dom.J(), c.seed, std::isfinite(lam.value)));
    r.add(row(id, "[mu]_A_pq", muc.value, muc.witness_id, dom.J(), c.seed, std::isfinite(muc.value)));
    for (int h = 0; h <= m; ++h) {
        const double th = static_cast<double>(h) / m;
        const Weight wh(GridFunction(dom, lambda.values().pow(th) * mu.values().pow(1.0 - th)));
        const Weight whinv = wh.inverse();
        const auto chain = cube_extremes(dom, [&](const DyadicCube& q) {
            const double lhs = average_product(Q, Pc, wh, whinv, q);
            const double rhs = std::pow(average_product(Q, Pc, lambda, lambda.inverse(), q), th) *
                               std::pow(average_product(Q, Pc, mu, mu.inverse(), q), 1.0 - th);
            return lhs / rhs;
        });
        const auto combined = apq_constant(wh, e3.p, e3.q);
        const double bound = std::pow(lam.value, th) * std::pow(muc.value, 1.0 - th);
        const std::string tag = "h=" + std::to_string(h) + " m=" + std::to_string(m);
        r.add(row(id, tag + " per-cube chain ratio", chain.max, chain.max_id, dom.J(), c.seed,
                  chain.max <= 1.0 + tol));
        r.add(row(id, tag + " [lambda nu^((m-h)/m)]_A_pq / bound", combined.value / bound, combined.witness_id,
                  dom.J(), c.seed, combined.value <= bound * (1.0 + tol)));
    }
    return r;
}

Report openness(const ExperimentConfig& c) {
    const std::string id = "openness";
    const Domain dom = c.domain();
    const auto p = c.exponent("p", "2", dom);
    const auto q = c.exponent("q", "3", dom);
    const Weight w(c.sample_expression("w", "abs(x1)^0.3", dom));
    Report r;
    try {
        const auto o = openness_exponents(w, p, q);
        r.add(row(id, "s", o.s, "A_sp constant " + format_number(o.s_constant), dom.J(), c.seed,
                  o.s > 1.0 / p.minus() && o.s < 1.0));
        r.add(row(id, "r", o.r, "A_rq' constant " + format_number(o.r_constant), dom.J(), c.seed,
                  o.r > 1.0 / conjugate(q).minus() && o.r < 1.0));
        r.add(row(id, "(p/u)^-", o.p_over_u_minus, "", dom.J(), c.seed, o.p_over_u_minus > 1.0));
        r.add(row(id, "(q'/v')^-", o.qc_over_vc_minus, "", dom.J(), c.seed, o.qc_over_vc_minus > 1.0));
    } catch (const ConvergenceError& e) {
        r.add(row(id, "admissible s and r", kInf, "", dom.J(), c.seed, false, e.what()));
    }
    return r;
}

Report prop31(const ExperimentConfig& c) {
    const std::string id = "prop31";
    const auto Js = default_sweep(c);
    const int trials = c.trials_or(5);
    Report r;
    for (int k = 1; k <= 2; ++k) {
        std::map<int, double> at;
        for (int J : Js) {
            const Domain dom = c.domain(J);
            const auto b = c.sample_expression("b", "x1", dom);
            const auto eta = c.sample_expression("eta", "1", dom);
            const auto delta = c.sample_expression("delta", "0", dom);
            TrialMax worst;
            worst.take(run_trials(trials, [&](std::uint64_t t) {
                auto rng = trial_rng(c.seed, t);
                const auto f = detail::random_test_function(dom, rng, false);
                const auto S = cz_sparse_grid(f, {0, 0});
                return verify_prop31(S, b, eta, delta, f, k).constant;
            }));
            at[J] = worst.value;
            r.add(row(id, "k=" + std::to_string(k) + " constant", worst.value, trial_witness(worst.trial), J, c.seed,
                      std::isfinite(worst.value)));
        }
        const auto v = sweep_constant(Js, [&](int J) { return at[J]; });
        r.add(row(id, "k=" + std::to_string(k) + " growth across J", v.max_growth, "", Js.back(), c.seed,
                  v.finite && !v.divergent));
    }
    return r;
}

Report prop32(const ExperimentConfig& c) {
    const std::string id = "prop32";
    const auto Js = default_sweep(c);
    Report r;
    const auto verdict = sweep_constant(Js, [&](int J) {
        const Domain dom = c.domain(J);
        const Weight w(c.sample_expression("w", "abs(x1)^0.2", dom));
        const auto s = apq_constant(w, c.exponent("p", "2", dom), c.exponent("q", "4", dom));
        r.add(row(id, "[w]_A_pq", s.value, s.witness_id, J, c.seed, std::isfinite(s.value)));
        return s.value;
    });
    r.add(row(id, "[w]_A_pq growth across J", verdict.max_growth, "", Js.back(), c.seed,
              verdict.finite && !verdict.divergent));

    const Domain dom = c.domain();
    const auto p = c.exponent("p", "2", dom), q = c.exponent("q", "4", dom);
    const auto beta = reciprocal_subtract(p, q);
    const auto w = c.sample_expression("w", "abs(x1)^0.2", dom);
    const auto P = GPhiFunction::power(p), Q = GPhiFunction::power(q);
    const auto ratios = run_trials(c.trials_or(100), [&](std::uint64_t t) {
        auto rng = trial_rng(c.seed, t);
        const auto f = detail::random_test_function(dom, rng, true);
        const auto S = cz_sparse_grid(map(f, [](double x) { return std::abs(x); }), {0, 0});
        return weighted_norm(Q, apply_Ibeta(S, beta, f), w) / weighted_norm(P, f, w);
    });
    TrialMax worst;
    worst.take(ratios);
    const double med = detail::median(ratios);
    r.add(row(id, "max ratio", worst.value, trial_witness(worst.trial), dom.J(), c.seed, std::isfinite(worst.value)));
    r.add(row(id, "median ratio", med, "", dom.J(), c.seed, med > 0.0));
    r.add(row(id, "max / median", worst.value / med, trial_witness(worst.trial), dom.J(), c.seed,
              worst.value / med <= c.tolerance(id, 10.0)));
    return r;
}

Report sparse_weights(const ExperimentConfig& c) {
    const std::string id = "sparse_weights";
    const auto Js = default_sweep(c);
    const int trials = c.trials_or(20);
    const int m = c.order(2);
    Report r;
    std::map<std::string, std::map<int, double>> at;
    for (int J : Js) {
        const Domain dom = c.domain(J);
        const auto p = c.exponent("p", "2", dom), q = c.exponent("q", "3", dom);
        const auto P = GPhiFunction::power(p), Q = GPhiFunction::power(q);
        const auto mu = c.sample_expression("mu", "abs(x1)^0.2", dom);
        const auto lambda = c.sample_expression("lambda", "abs(x1)^(-0.1)", dom);
        const GridFunction eta(dom, (mu.values() / lambda.values()).pow(1.0 / m));
        const auto eta_pow = [&](int k) { return GridFunction(dom, lambda.values() * eta.values().pow(k)); };
        for (int k = 1; k <= m; ++k) {
            const auto wq_src = eta_pow(k), wp_dst = eta_pow(m - k), wp_src = eta_pow(m);
            std::vector<double> pr(static_cast<std::size_t>(trials));
            const auto qr = run_trials(trials, [&](std::uint64_t t) {
                auto rng = trial_rng(c.seed, t);
                const auto F = detail::random_test_function(dom, rng, false);
                const auto S = cz_sparse_grid(F, {0, 0});
                const auto AF = apply_A_eta_iter(S, eta, F, k);
                pr[t] = weighted_norm(P, AF, wp_dst) / weighted_norm(P, F, wp_src);
                return weighted_norm(Q, AF, lambda) / weighted_norm(Q, F, wq_src);
            });
            for (const auto& [name, v] : {std::pair{std::string("q-norm"), qr}, std::pair{std::string("p-norm"), pr}}) {
                TrialMax worst;
                worst.take(v);
                const std::string check = name + " k=" + std::to_string(k) + " m=" + std::to_string(m);
                at[check][J] = worst.value;
                r.add(row(id, check + " ratio", worst.value, trial_witness(worst.trial), J, c.seed,
                          std::isfinite(worst.value)));
            }
        }
    }
    for (auto& [check, values] : at) {
        const auto v = sweep_constant(Js, [&](int J) { return values[J]; });
        r.add(row(id, check + " growth across J", v.max_growth, "", Js.back(), c.seed, v.finite && !v.divergent));
    }
    return r;
}

Report sparsity(const ExperimentConfig& c) {
    const std::string id = "sparsity";
    const Domain dom = c.domain();
    const int trials = c.trials_or(50);
    const double threshold = c.param("threshold", 2.0);
    const auto shifts = all_shifts(dom.dim());
    struct Worst {
        double ratio = 1.0;
        std::string witness;
        bool ok = true;
    };
    std::vector<Worst> cz(static_cast<std::size_t>(trials)), aug(static_cast<std::size_t>(trials));
    parallel_for(trials, [&](std::int64_t t) {
        auto rng = trial_rng(c.seed, static_cast<std::uint64_t>(t));
        const auto f = detail::random_test_function(dom, rng, false, 0.3);
        const auto b = detail::random_test_function(dom, rng, true);
        auto& a = cz[static_cast<std::size_t>(t)];
        auto& o = aug[static_cast<std::size_t>(t)];
        for (const auto& sh : shifts) {
            const auto S = cz_sparse_grid(f, sh, threshold);
            const auto vs = verify_sparse(S);
            if (vs.min_ratio < a.ratio || a.witness.empty()) a = {vs.min_ratio, vs.witness, a.ok};
            a.ok = a.ok && vs.sparse && vs.disjoint;
            const auto va = verify_sparse(oscillation_augment(S, b));
            if (va.min_ratio < o.ratio || o.witness.empty()) o = {va.min_ratio, va.witness, o.ok};
            o.ok = o.ok && va.sparse && va.disjoint;
        }
    });
    Report r;
    for (const auto& [name, v] : {std::pair{std::string("cz_sparse"), &cz}, std::pair{std::string("oscillation_augment"), &aug}}) {
        std::size_t wt = 0;
        bool ok = true;
        for (std::size_t t = 0; t < v->size(); ++t) {
            ok = ok && (*v)[t].ok;
            if ((*v)[t].ratio < (*v)[wt].ratio) wt = t;
        }
        r.add(row(id, name + " min |E(Q)|/|Q|", (*v)[wt].ratio, trial_witness(wt) + " " + (*v)[wt].witness, dom.J(),
                  c.seed, ok && (*v)[wt].ratio >= 0.5));
    }
    return r;
}

Report commutator_identity(const ExperimentConfig& c) {
    const std::string id = "commutator_identity";
    const Domain dom = c.domain();
    const auto k = kernel_for_dimension(dom.dim());
    TrialMax worst;
    worst.take(run_trials(c.trials_or(20), [&](std::uint64_t t) {
        auto rng = trial_rng(c.seed, t);
        const auto b = detail::random_test_function(dom, rng, true);
        const auto f = detail::random_test_function(dom, rng, true);
        const auto expanded = commutator(k, b, f, 1);
        const Eigen::ArrayXd direct = b.values() * apply_czo(k, f).values() - apply_czo(k, times(b, f)).values();
        return (expanded.values() - direct).abs().maxCoeff();
    }));
    Report r;
    r.add(row(id, "max |T_b f - (b Tf - T(bf))|", worst.value, trial_witness(worst.trial), dom.J(), c.seed,
              worst.value <= c.tolerance(id, 1e-10)));
    return r;
}

Report self_adjoint(const ExperimentConfig& c) {
    const std::string id = "self_adjoint";
    const Domain dom = c.domain();
    TrialMax worst;
    worst.take(run_trials(c.trials_or(50), [&](std::uint64_t t) {
        auto rng = trial_rng(c.seed, t);
        const auto f = detail::random_test_function(dom, rng, false);
        const auto g = detail::random_test_function(dom, rng, false);
        const auto S = cz_sparse_grid(GridFunction(dom, f.values() + g.values()), {0, 0});
        const double a = integrate(times(g, apply_AS(S, f)));
        const double b = integrate(times(f, apply_AS(S, g)));
        return std::abs(a - b) / std::abs(a);
    }));
    Report r;
    r.add(row(id, "relative asymmetry", worst.value, trial_witness(worst.trial), c.J, c.seed,
              worst.value <= c.tolerance(id, 1e-12)));
    return r;
}

const std::map<std::string, Suite>& registry() {
    static const std::map<std::string, Suite> suites{
        {"constant_exponent", constant_exponent},
        {"unit_modular", unit_modular},
        {"lemma_326", lemma_326},
        {"holder_pp", holder_pp},
        {"holder_musielak", holder_musielak},
        {"norm_product", norm_product},
        {"equivalence_beta", equivalence_beta},
        {"averages", averages},
        {"apq_properties", apq_properties},
        {"factores", factores},
        {"openness", openness},
        {"prop31", prop31},
        {"prop32", prop32},
        {"sparse_weights", sparse_weights},
        {"sparsity", sparsity},
        {"commutator_identity", commutator_identity},
        {"self_adjoint", self_adjoint},
    };
    return suites;
}

}  // namespace

const std::vector<std::string>& lemma_suite_ids() {
    static const std::vector<std::string> ids{
        "constant_exponent", "unit_modular", "lemma_326",  "holder_pp",      "holder_musielak", "norm_product",
        "equivalence_beta",  "averages",     "apq_properties", "factores",   "openness",        "prop31",
        "prop32",            "sparse_weights", "sparsity", "commutator_identity", "self_adjoint"};
    return ids;
}

Report verify_lemma(const std::string& id, const ExperimentConfig& config) {
    const auto it = registry().find(id);
    if (it == registry().end()) throw ConfigError("unknown lemma suite " + id);
    return it->second(config);
}

}  // namespace varsparse
