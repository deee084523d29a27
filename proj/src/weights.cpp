#include "varsparse/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "varsparse/error.hpp"
#include "varsparse/parallel.hpp"

namespace varsparse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same(const Domain& a, const Domain& b) {
    if (!(a == b)) throw PreconditionError("arguments live on different domains");
}

// ||chi_Q g|| / ||chi_Q|| for a Phi-function
double normalised(const GPhiFunction& psi, const Eigen::ArrayXd& g, const DyadicCube& q) {
    return cube_norm(psi, g, q) / indicator_norm(psi, q);
}

double checked_ratio(double value, const DyadicCube& q, const Domain& dom) {
    if (std::isnan(value) || std::isinf(value)) throw DomainError("norm overflow on cube " + cube_id(q, dom.dim()));
    return value;
}

GPhiFunction delta_norm_function(const GridFunction& delta) {
    return GPhiFunction::power(exponent_from_delta(delta));
}

}  // namespace

Weight::Weight(GridFunction w) : w_(std::move(w)) {
    if (!(w_.values() > 0.0).all() || !w_.values().isFinite().all())
        throw PreconditionError("weights must be strictly positive and finite");
}

Weight Weight::from_expression(std::string_view src, const Domain& dom) { return Weight(sample(src, dom)); }

Weight Weight::inverse() const { return Weight(GridFunction(domain(), values().inverse())); }

Weight Weight::pow(double s) const { return Weight(GridFunction(domain(), values().pow(s))); }

CubeFunctional CubeFunctional::constant(double c) {
    if (!(c > 0.0) || std::isinf(c)) throw PreconditionError("constant functional must be positive");
    CubeFunctional a;
    a.kind_ = Kind::Constant;
    a.c_ = c;
    return a;
}

CubeFunctional CubeFunctional::power_measure(double delta) {
    if (!(delta >= 0.0)) throw PreconditionError("delta must be non-negative");
    CubeFunctional a;
    a.kind_ = Kind::PowerMeasure;
    a.c_ = delta;
    return a;
}

CubeFunctional CubeFunctional::var_norm(const GridFunction& delta) {
    CubeFunctional a;
    a.kind_ = Kind::VarNorm;
    a.norm_ = std::make_shared<const GPhiFunction>(delta_norm_function(delta));
    return a;
}

double CubeFunctional::operator()(const DyadicCube& q, const Domain& dom) const {
    switch (kind_) {
        case Kind::Constant:
            return c_;
        case Kind::PowerMeasure:
            return std::pow(cube_measure(q, dom), c_ / dom.dim());
        case Kind::VarNorm:
            return indicator_norm(*norm_, q);
    }
    return c_;
}

ScanResult scan_cubes(const Domain& dom, const std::vector<DyadicCube>& cubes,
                      const std::function<double(const DyadicCube&)>& g) {
    std::vector<double> v(cubes.size());
    parallel_for(static_cast<std::int64_t>(cubes.size()),
                 [&](std::int64_t i) { v[static_cast<std::size_t>(i)] = g(cubes[static_cast<std::size_t>(i)]); });
    ScanResult r;
    r.value = -kInf;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::isnan(v[i])) continue;
        if (v[i] > r.value) {
            r.value = v[i];
            r.witness = cubes[i];
        }
    }
    if (r.value == -kInf) {
        r.value = 0.0;
        return r;
    }
    r.witness_id = cube_id(r.witness, dom.dim());
    return r;
}

ScanResult t_infty_constant(const CubeFunctional& a, const Domain& dom, const CubeUniverse& u) {
    const auto cubes = cube_universe(dom, u);
    std::vector<double> value(cubes.size());
    parallel_for(static_cast<std::int64_t>(cubes.size()), [&](std::int64_t i) {
        value[static_cast<std::size_t>(i)] = a(cubes[static_cast<std::size_t>(i)], dom);
    });
    std::map<std::tuple<int, Index, Index, int, int>, double> lookup;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        const auto& q = cubes[i];
        lookup[{q.level, q.corner[0], q.corner[1], q.shift[0], q.shift[1]}] = value[i];
    }
    const int kmax = u.kmax.value_or(dom.L() + 1);
    ScanResult r;
    r.value = 0.0;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        std::optional<DyadicCube> parent = cubes[i];
        while (parent && parent->level <= kmax) {
            const auto it =
                lookup.find({parent->level, parent->corner[0], parent->corner[1], parent->shift[0], parent->shift[1]});
            if (it != lookup.end()) {
                const double ratio = value[i] / it->second;
                if (ratio > r.value) {
                    r.value = ratio;
                    r.witness = cubes[i];
                    r.witness_id = cube_id(cubes[i], dom.dim()) + " in " + cube_id(*parent, dom.dim());
                }
            }
            parent = cube_parent(*parent, dom);
        }
    }
    return r;
}

ScanResult ap_constant(const Weight& w, const ExponentFunction& p, const CubeUniverse& u) {
    const Domain& dom = p.domain();
    require_same(dom, w.domain());
    const auto P = GPhiFunction::power(p), Pc = GPhiFunction::power(conjugate(p));
    const Eigen::ArrayXd winv = w.values().inverse();
    return scan_cubes(dom, cube_universe(dom, u), [&](const DyadicCube& q) {
        return checked_ratio(cube_norm(P, w.values(), q) * cube_norm(Pc, winv, q) / cube_measure(q, dom), q, dom);
    });
}

ScanResult apq_constant(const Weight& w, const ExponentFunction& p, const ExponentFunction& q,
                        const CubeUniverse& u) {
    const Domain& dom = p.domain();
    require_same(dom, w.domain());
    require_same(dom, q.domain());
    const auto Q = GPhiFunction::power(q), Pc = GPhiFunction::power(conjugate(p));
    const Eigen::ArrayXd winv = w.values().inverse();
    return scan_cubes(dom, cube_universe(dom, u), [&](const DyadicCube& c) {
        return checked_ratio(normalised(Q, w.values(), c) * normalised(Pc, winv, c), c, dom);
    });
}

ScanResult bump_constant_power(const Weight& w, const Weight& v, const ExponentFunction& p, double S, double R,
                               const CubeFunctional& a, int m, const CubeUniverse& u) {
    const Domain& dom = p.domain();
    require_same(dom, w.domain());
    require_same(dom, v.domain());
    const auto pc = conjugate(p);
    if (!(S > p.plus() / p.minus())) throw PreconditionError("bump requires S > p+/p-");
    if (!(R > pc.plus() / pc.minus())) throw PreconditionError("bump requires R > (p')+/(p')-");
    if (m < 0) throw PreconditionError("m must be non-negative");
    const auto Sp = GPhiFunction::power(scale(p, S)), Rp = GPhiFunction::power(scale(pc, R));
    const Eigen::ArrayXd vinv = v.values().inverse();
    return scan_cubes(dom, cube_universe(dom, u), [&](const DyadicCube& q) {
        const double am = m == 0 ? 1.0 : std::pow(a(q, dom), m);
        return checked_ratio(am * normalised(Sp, w.values(), q) * normalised(Rp, vinv, q), q, dom);
    });
}

ScanResult bump_constant_gphi(const Weight& w, const Weight& v, const GPhiFunction& E, const GPhiFunction& A,
                              const GridFunction& delta, int m, const CubeUniverse& u) {
    const Domain& dom = E.domain();
    require_same(dom, A.domain());
    require_same(dom, w.domain());
    require_same(dom, v.domain());
    if (m < 0) throw PreconditionError("m must be non-negative");
    const auto Dn = delta_norm_function(delta);
    const Eigen::ArrayXd vinv = v.values().inverse();
    return scan_cubes(dom, cube_universe(dom, u), [&](const DyadicCube& q) {
        const double am = m == 0 ? 1.0 : std::pow(indicator_norm(Dn, q), m);
        return checked_ratio(am * normalised(E, w.values(), q) * normalised(A, vinv, q), q, dom);
    });
}

namespace {

Weight extremal(const Domain& dom, const std::vector<DyadicCube>& cubes,
                const std::function<double(const DyadicCube&)>& factor) {
    std::vector<double> f(cubes.size());
    parallel_for(static_cast<std::int64_t>(cubes.size()),
                 [&](std::int64_t i) { f[static_cast<std::size_t>(i)] = factor(cubes[static_cast<std::size_t>(i)]); });
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(dom.cell_count());
    for (std::size_t i = 0; i < cubes.size(); ++i)
        for (Index c : cube_cells(cubes[i], dom)) v[c] = std::max(v[c], f[i]);
    return Weight(GridFunction(dom, std::move(v)));
}

}  // namespace

Weight remark_extremal_weight(const Weight& w, const ExponentFunction& p, double S, const CubeFunctional& a, int m,
                              const CubeUniverse& u) {
    const Domain& dom = p.domain();
    const auto Sp = GPhiFunction::power(scale(p, S));
    return extremal(dom, cube_universe(dom, u), [&](const DyadicCube& q) {
        const double am = m == 0 ? 1.0 : std::pow(a(q, dom), m);
        return am * normalised(Sp, w.values(), q);
    });
}

Weight remark_extremal_weight(const Weight& w, const GPhiFunction& E, const GridFunction& delta, int m,
                              const CubeUniverse& u) {
    const Domain& dom = E.domain();
    const auto Dn = delta_norm_function(delta);
    return extremal(dom, cube_universe(dom, u), [&](const DyadicCube& q) {
        const double am = m == 0 ? 1.0 : std::pow(indicator_norm(Dn, q), m);
        return am * normalised(E, w.values(), q);
    });
}

namespace {

// 64 Chebyshev points of (lo, hi), descending
std::vector<double> chebyshev_candidates(double lo, double hi) {
    std::vector<double> out;
    for (int i = 0; i < 64; ++i) {
        const double c = std::cos(std::numbers::pi * (i + 0.5) / 64.0);
        out.push_back(lo + (hi - lo) * (1.0 + c) / 2.0);
    }
    return out;
}

struct Admissible {
    double largest = 0.0, smallest = 0.0, constant = 0.0;
    bool found = false;
};

Admissible search(const std::vector<double>& candidates, const std::function<double(double)>& constant_at,
                  double cap) {
    Admissible a;
    for (double s : candidates) {
        double c;
        try {
            c = constant_at(s);
        } catch (const DomainError&) {
            c = kInf;
        }
        if (c <= cap) {
            if (!a.found) {
                a.found = true;
                a.largest = s;
                a.constant = c;
            }
            a.smallest = s;
        } else if (a.found) {
            break;
        }
    }
    return a;
}

}  // namespace

OpennessResult openness_exponents(const Weight& w, const ExponentFunction& p, const ExponentFunction& q,
                                  std::optional<double> cap, const CubeUniverse& u) {
    const Domain& dom = p.domain();
    if (!(p.minus() > 1.0)) throw PreconditionError("openness requires p- > 1");
    if (q.has_infinity()) throw PreconditionError("openness requires q+ < inf");
    const auto qc = conjugate(q);
    const Weight winv = w.inverse();
    const double limit =
        cap.value_or(4.0 * std::max(ap_constant(w, p, u).value, ap_constant(winv, qc, u).value));
    const auto s = search(
        chebyshev_candidates(1.0 / p.minus(), 1.0),
        [&](double x) { return ap_constant(w.pow(1.0 / x), scale(p, x), u).value; }, limit);
    if (!s.found) throw ConvergenceError("no admissible s below the cap");
    const auto r = search(
        chebyshev_candidates(1.0 / qc.minus(), 1.0),
        [&](double x) { return ap_constant(winv.pow(1.0 / x), scale(qc, x), u).value; }, limit);
    if (!r.found) throw ConvergenceError("no admissible r below the cap");

    // 1/u = 1 - s + 1/p and 1/v = r - 1/q'
    const Index N = dom.cell_count();
    Eigen::ArrayXd uv(N), vv(N);
    double pu = kInf, qv = kInf;
    for (Index c = 0; c < N; ++c) {
        const double inv_p = 1.0 / p[c];
        const double inv_qc = std::isinf(qc[c]) ? 0.0 : 1.0 / qc[c];
        uv[c] = 1.0 / (1.0 - s.largest + inv_p);
        vv[c] = 1.0 / (r.largest - inv_qc);
        pu = std::min(pu, p[c] / uv[c]);
        qv = std::min(qv, qc[c] / conjugate_exponent(vv[c]));
    }
    return OpennessResult{s.largest,
                          r.largest,
                          s.smallest,
                          r.smallest,
                          limit,
                          s.constant,
                          r.constant,
                          ExponentFunction(GridFunction(dom, std::move(uv))),
                          ExponentFunction(GridFunction(dom, std::move(vv))),
                          pu,
                          qv};
}

double cube_oscillation(const GridFunction& b, const DyadicCube& q) {
    const Domain& dom = b.domain();
    const double mean = cube_average(b, q);
    const auto cells = cube_cells(q, dom);
    std::vector<double> d(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) d[i] = std::fabs(b[cells[i]] - mean);
    return pairwise_sum(d) * dom.cell_volume();
}

ScanResult lipschitz_a_norm(const GridFunction& b, const CubeFunctional& a, const CubeUniverse& u) {
    const Domain& dom = b.domain();
    return scan_cubes(dom, cube_universe(dom, u), [&](const DyadicCube& q) {
        return cube_oscillation(b, q) / (a(q, dom) * cube_measure(q, dom));
    });
}

ScanResult bmo_eta_delta_norm(const GridFunction& b, const GridFunction& eta, const GridFunction& delta,
                              const CubeUniverse& u) {
    const Domain& dom = b.domain();
    require_same(dom, eta.domain());
    require_same(dom, delta.domain());
    const auto Dn = delta_norm_function(delta);
    return scan_cubes(dom, cube_universe(dom, u), [&](const DyadicCube& q) {
        const double osc = cube_oscillation(b, q);
        if (osc == 0.0) return 0.0;
        return osc / (indicator_norm(Dn, q) * cube_integral(eta.values(), q, dom));
    });
}

namespace {

double pointwise(const GridFunction& b, const DyadicCube& q, const GPhiFunction& Dn) {
    const Domain& dom = b.domain();
    const double mean = cube_average(b, q);
    const Index N = dom.cells_per_axis();
    const Index lo0 = std::max<Index>(0, q.corner[0] - q.side), hi0 = std::min(N, q.corner[0] + 2 * q.side);
    Index lo1 = 0, hi1 = 1;
    if (dom.dim() == 2) {
        lo1 = std::max<Index>(0, q.corner[1] - q.side);
        hi1 = std::min(N, q.corner[1] + 2 * q.side);
    }
    double best = 0.0;
    for (Index i1 = lo1; i1 < hi1; ++i1)
        for (Index i0 = lo0; i0 < hi0; ++i0) best = std::max(best, std::fabs(b[dom.cell_index({i0, i1})] - mean));
    return best / indicator_norm(Dn, q);
}

}  // namespace

double symbol_pointwise_bound(const GridFunction& b, const DyadicCube& q, const GridFunction& delta) {
    require_same(b.domain(), delta.domain());
    return pointwise(b, q, delta_norm_function(delta));
}

ScanResult symbol_pointwise_scan(const GridFunction& b, const GridFunction& delta, const CubeUniverse& u) {
    const Domain& dom = b.domain();
    require_same(dom, delta.domain());
    const auto Dn = delta_norm_function(delta);
    return scan_cubes(dom, cube_universe(dom, u), [&](const DyadicCube& q) { return pointwise(b, q, Dn); });
}

ScanResult izuki_ratio(const GridFunction& b, const CubeFunctional& a, const ExponentFunction& p, int k,
                       const CubeUniverse& u) {
    const Domain& dom = b.domain();
    require_same(dom, p.domain());
    const auto P = GPhiFunction::power(p);
    return scan_cubes(dom, cube_universe(dom, u), [&](const DyadicCube& q) {
        const double mean = cube_average(b, q);
        const Eigen::ArrayXd g = (b.values() - mean).abs().pow(k);
        return normalised(P, g, q) / std::pow(a(q, dom), k);
    });
}

SweepVerdict sweep_constant(const std::vector<int>& J, const std::function<double(int)>& constant_at) {
    SweepVerdict v;
    v.J = J;
    for (int j : J) {
        const double c = constant_at(j);
        v.values.push_back(c);
        if (!std::isfinite(c)) v.finite = false;
    }
    for (std::size_t i = 1; i < v.values.size(); ++i) {
        const double prev = v.values[i - 1], cur = v.values[i];
        if (!(prev > 0.0)) continue;
        const double growth = cur / prev;
        v.max_growth = std::max(v.max_growth, growth);
        const double levels = J[i] - J[i - 1];
        if (growth >= std::pow(1.5, levels / 2.0)) v.divergent = true;
    }
    if (!v.finite) v.divergent = true;
    return v;
}

}  // namespace varsparse
