#include "varsparse/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "varsparse/error.hpp"

namespace varsparse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Index kPairBudget = 1'000'000;

double reciprocal(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

struct Offset {
    Index d0, d1;
};

// Offsets of every sampled pair: all small separations plus a geometric ladder
// of large ones, each offset listed once (unordered pairs).
std::vector<Index> offset_ladder(Index max_offset, Index dense_up_to) {
    std::vector<Index> out;
    for (Index d = 1; d <= std::min(dense_up_to, max_offset); ++d) out.push_back(d);
    double next = static_cast<double>(dense_up_to) * 1.1;
    while (static_cast<Index>(next) <= max_offset) {
        const Index d = static_cast<Index>(next);
        if (d > out.back()) out.push_back(d);
        next *= 1.1;
    }
    if (max_offset > dense_up_to && out.back() != max_offset) out.push_back(max_offset);
    return out;
}

template <class Visit>
Index for_each_pair(const Domain& dom, Visit&& visit) {
    const Index N = dom.cells_per_axis();
    std::vector<Offset> offsets;
    if (dom.dim() == 1) {
        for (Index d : offset_ladder(N - 1, 64)) offsets.push_back({d, 0});
    } else {
        std::vector<Index> ladder = offset_ladder(N - 1, 8);
        std::vector<Index> signed_ladder{0};
        for (Index d : ladder) {
            signed_ladder.push_back(d);
            signed_ladder.push_back(-d);
        }
        for (Index d1 : signed_ladder)
            for (Index d0 : signed_ladder)
                if (d1 > 0 || (d1 == 0 && d0 > 0)) offsets.push_back({d0, d1});
    }
    auto anchors = [&](const Offset& o) {
        Index count = 1;
        for (int a = 0; a < dom.dim(); ++a) count *= N - std::abs(a == 0 ? o.d0 : o.d1);
        return count;
    };
    auto is_small = [](const Offset& o) { return std::max(std::abs(o.d0), std::abs(o.d1)) <= 2; };
    Index small_total = 0, large_total = 0;
    for (const auto& o : offsets) (is_small(o) ? small_total : large_total) += anchors(o);
    Index stride = 1;
    if (small_total + large_total > kPairBudget) {
        const Index room = std::max<Index>(kPairBudget - small_total, 1);
        stride = (large_total + room - 1) / room;
    }
    Index visited = 0;
    for (const auto& o : offsets) {
        const Index step = is_small(o) ? 1 : stride;
        const Index lo0 = std::max<Index>(0, -o.d0), hi0 = N - std::max<Index>(0, o.d0);
        const Index lo1 = std::max<Index>(0, -o.d1), hi1 = dom.dim() == 2 ? N - std::max<Index>(0, o.d1) : 1;
        const double dist = dom.cell_side() * std::hypot(static_cast<double>(o.d0), static_cast<double>(o.d1));
        Index k = 0;
        for (Index i1 = lo1; i1 < hi1; ++i1)
            for (Index i0 = lo0; i0 < hi0; ++i0, ++k) {
                if (k % step != 0) continue;
                const Index x = dom.cell_index({i0, i1});
                const Index y = dom.cell_index({i0 + o.d0, i1 + o.d1});
                visit(x, y, dist);
                ++visited;
            }
    }
    return visited;
}

double checked_exponent_value(double p) {
    if (std::isnan(p) || p < 1.0) throw PreconditionError("exponent value " + std::to_string(p) + " below 1");
    return p;
}

}  // namespace

ExponentFunction::ExponentFunction(GridFunction values, std::optional<double> p_inf)
    : values_(std::move(values)), p_inf_(p_inf) {
    minus_ = kInf;
    plus_ = 1.0;
    for (Index c = 0; c < values_.size(); ++c) {
        const double p = checked_exponent_value(values_[c]);
        minus_ = std::min(minus_, p);
        plus_ = std::max(plus_, p);
    }
    if (p_inf_ && (std::isnan(*p_inf_) || *p_inf_ < 1.0)) throw PreconditionError("p_inf must lie in [1, inf]");
}

ExponentFunction ExponentFunction::constant(const Domain& dom, double p, std::optional<double> p_inf) {
    return ExponentFunction(GridFunction::constant(dom, p), p_inf ? p_inf : std::optional<double>(p));
}

ExponentFunction ExponentFunction::from_expression(std::string_view src, const Domain& dom,
                                                   std::optional<double> p_inf) {
    return ExponentFunction(sample(src, dom), p_inf);
}

double conjugate_exponent(double p) {
    if (p == 1.0) return kInf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

ExponentFunction conjugate(const ExponentFunction& p) {
    Eigen::ArrayXd v = p.values().unaryExpr([](double x) { return conjugate_exponent(x); });
    std::optional<double> pinf;
    if (p.p_inf()) pinf = conjugate_exponent(*p.p_inf());
    return ExponentFunction(GridFunction(p.domain(), std::move(v)), pinf);
}

LogHolderReport check_log_holder(const ExponentFunction& p) {
    if (p.has_infinity()) throw PreconditionError("log-Hoelder check requires a finite exponent");
    if (!p.p_inf()) throw PreconditionError("log-Hoelder check requires a declared p_inf");
    const Domain& dom = p.domain();
    const Eigen::ArrayXd inv = p.values().inverse();
    LogHolderReport r;
    r.pairs_sampled = for_each_pair(dom, [&](Index x, Index y, double dist) {
        const double c = std::fabs(inv[x] - inv[y]) * std::log(std::numbers::e + 1.0 / dist);
        if (c > r.c_local) {
            r.c_local = c;
            r.local_x = x;
            r.local_y = y;
        }
    });
    const double inv_inf = reciprocal(*p.p_inf());
    for (Index c = 0; c < dom.cell_count(); ++c) {
        const auto x = dom.cell_center(c);
        const double g = std::fabs(inv[c] - inv_inf) * std::log(std::numbers::e + std::hypot(x[0], x[1]));
        if (g > r.c_global) {
            r.c_global = g;
            r.global_cell = c;
        }
    }
    return r;
}

double check_loglog(const GridFunction& q) {
    if (!q.values().isFinite().all()) throw PreconditionError("log-log check requires q^+ < inf");
    double best = 0.0;
    for_each_pair(q.domain(), [&](Index x, Index y, double dist) {
        const double c =
            std::fabs(q[x] - q[y]) * std::log(std::numbers::e + std::log(std::numbers::e + 1.0 / dist));
        best = std::max(best, c);
    });
    return best;
}

ExponentFunction reciprocal_subtract(const ExponentFunction& p, const ExponentFunction& q) {
    if (!(p.domain() == q.domain())) throw PreconditionError("exponents live on different domains");
    Eigen::ArrayXd v(p.values().size());
    for (Index c = 0; c < v.size(); ++c) {
        if (p[c] > q[c]) throw PreconditionError("reciprocal_subtract requires p <= q cellwise");
        const double inv = reciprocal(p[c]) - reciprocal(q[c]);
        v[c] = inv <= 0.0 ? kInf : 1.0 / inv;
    }
    std::optional<double> pinf;
    if (p.p_inf() && q.p_inf()) {
        const double inv = reciprocal(*p.p_inf()) - reciprocal(*q.p_inf());
        pinf = inv <= 0.0 ? kInf : 1.0 / inv;
    }
    return ExponentFunction(GridFunction(p.domain(), std::move(v)), pinf);
}

ExponentFunction reciprocal_add(const ExponentFunction& p, const ExponentFunction& q) {
    if (!(p.domain() == q.domain())) throw PreconditionError("exponents live on different domains");
    Eigen::ArrayXd v(p.values().size());
    for (Index c = 0; c < v.size(); ++c) {
        const double inv = reciprocal(p[c]) + reciprocal(q[c]);
        v[c] = inv == 0.0 ? kInf : 1.0 / inv;
    }
    std::optional<double> pinf;
    if (p.p_inf() && q.p_inf()) {
        const double inv = reciprocal(*p.p_inf()) + reciprocal(*q.p_inf());
        pinf = inv == 0.0 ? kInf : 1.0 / inv;
    }
    return ExponentFunction(GridFunction(p.domain(), std::move(v)), pinf);
}

ExponentFunction scale(const ExponentFunction& p, double s) {
    if (!(s > 0.0)) throw PreconditionError("scale factor must be positive");
    constexpr double slack = 4.0 * std::numeric_limits<double>::epsilon();
    if (s * p.minus() < 1.0 - slack) throw PreconditionError("scale requires s * p^- >= 1");
    // the boundary s = 1/p^- may round just below 1
    Eigen::ArrayXd v = (p.values() * s).max(1.0);
    std::optional<double> pinf;
    if (p.p_inf()) pinf = std::max(1.0, *p.p_inf() * s);
    return ExponentFunction(GridFunction(p.domain(), std::move(v)), pinf);
}

GridFunction delta_from(const ExponentFunction& r, double alpha) {
    const double n = r.domain().dim();
    if (!(alpha > 0.0 && alpha <= n)) throw PreconditionError("alpha must lie in (0, n]");
    if (n / alpha > r.minus()) throw PreconditionError("delta_from requires n/alpha <= r^-");
    Eigen::ArrayXd v = r.values().unaryExpr([&](double x) { return std::max(0.0, n * (alpha / n - reciprocal(x))); });
    return GridFunction(r.domain(), std::move(v));
}

GridFunction delta_from_pair(const ExponentFunction& p, const ExponentFunction& q, int m, double alpha) {
    if (!(p.domain() == q.domain())) throw PreconditionError("exponents live on different domains");
    if (m < 1) throw PreconditionError("commutator order m must be >= 1");
    const double n = p.domain().dim();
    Eigen::ArrayXd v(p.values().size());
    for (Index c = 0; c < v.size(); ++c) {
        const double gap = reciprocal(p[c]) - reciprocal(q[c]) - alpha / n;
        if (gap < -1e-14) throw PreconditionError("1/p - 1/q - alpha/n must be non-negative");
        v[c] = std::max(0.0, n * gap / m);
        if (v[c] >= n) throw PreconditionError("delta must stay below n");
    }
    return GridFunction(p.domain(), std::move(v));
}

ExponentFunction exponent_from_delta(const GridFunction& delta) {
    const double n = delta.domain().dim();
    Eigen::ArrayXd v(delta.size());
    for (Index c = 0; c < v.size(); ++c) {
        const double d = delta[c];
        if (d < 0.0 || d > n) throw PreconditionError("delta must lie in [0, n]");
        v[c] = d == 0.0 ? kInf : n / d;
    }
    return ExponentFunction(GridFunction(delta.domain(), std::move(v)));
}

}  // namespace varsparse
