#include "varsparse/gphi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>
#include <unordered_map>

#include "varsparse/error.hpp"
#include "varsparse/parallel.hpp"

namespace varsparse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNodes = 512;

std::uint64_t bits(double x) {
    std::uint64_t b;
    std::memcpy(&b, &x, sizeof b);
    return b;
}

struct ProfileKey {
    std::uint64_t p, q, c;
    int table;
    friend bool operator==(const ProfileKey&, const ProfileKey&) = default;
};

struct ProfileKeyHash {
    std::size_t operator()(const ProfileKey& k) const {
        std::size_t h = k.p * 0x9E3779B97F4A7C15ull;
        h ^= k.q + 0x7F4A7C15ull + (h << 6) + (h >> 2);
        h ^= k.c + 0x165667B1ull + (h << 6) + (h >> 2);
        h ^= static_cast<std::size_t>(k.table) + (h << 6) + (h >> 2);
        return h;
    }
};

double table_eval(const std::vector<double>& v, double t) {
    const auto& x = GPhiFunction::numeric_nodes();
    if (!(t > 0.0)) return 0.0;
    if (t < x[0]) return v[0] * (t / x[0]);
    if (t >= x[kNodes - 1]) {
        const double last = v[kNodes - 1];
        if (t == x[kNodes - 1] || std::isinf(last)) return last;
        const double slope = (last - v[kNodes - 2]) / (x[kNodes - 1] - x[kNodes - 2]);
        return last + slope * (t - x[kNodes - 1]);
    }
    auto k = static_cast<std::ptrdiff_t>(std::floor(12.0 * std::log2(t))) + 256;
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(kNodes) - 2);
    while (k > 0 && t < x[static_cast<std::size_t>(k)]) --k;
    while (k < static_cast<std::ptrdiff_t>(kNodes) - 2 && t >= x[static_cast<std::size_t>(k) + 1]) ++k;
    const auto i = static_cast<std::size_t>(k);
    const double a = v[i], b = v[i + 1];
    if (t == x[i]) return a;
    if (std::isinf(a) || std::isinf(b)) return kInf;
    const double w = (t - x[i]) / (x[i + 1] - x[i]);
    return a + w * (b - a);
}

// Cells with the same profile and the same |value| are merged with a count.
struct Entry {
    std::int32_t profile;
    double value;
    double count;
};

std::vector<Entry> collect_entries(const GPhiFunction& psi, std::span<const Index> cells,
                                   std::span<const double> values) {
    std::vector<Entry> e;
    e.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double a = std::fabs(values[i]);
        if (std::isnan(a)) throw DomainError("NaN value in norm argument");
        if (a > 0.0) e.push_back({psi.profile_of(cells[i]), a, 1.0});
    }
    std::sort(e.begin(), e.end(), [](const Entry& x, const Entry& y) {
        return std::tie(x.profile, x.value) < std::tie(y.profile, y.value);
    });
    std::size_t w = 0;
    for (std::size_t r = 0; r < e.size(); ++r) {
        if (w > 0 && e[w - 1].profile == e[r].profile && e[w - 1].value == e[r].value)
            e[w - 1].count += 1.0;
        else
            e[w++] = e[r];
    }
    e.resize(w);
    return e;
}

double entries_modular(const GPhiFunction& psi, const std::vector<Entry>& e, double lambda, double volume,
                       std::vector<double>& buf) {
    buf.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double v = psi.eval_profile(e[i].profile, e[i].value / lambda);
        if (std::isinf(v)) return kInf;
        buf[i] = e[i].count * v;
    }
    return pairwise_sum(buf) * volume;
}

double entries_norm(const GPhiFunction& psi, const std::vector<Entry>& e, const NormOptions& opt) {
    if (e.empty()) return 0.0;
    const double volume = psi.domain().cell_volume();
    std::vector<double> buf;
    auto rho = [&](double lambda) { return entries_modular(psi, e, lambda, volume, buf); };

    double floor = 0.0, vmax = 0.0, support = 0.0;
    for (const auto& x : e) {
        vmax = std::max(vmax, x.value);
        support += x.count;
        const auto& pr = psi.profile(x.profile);
        if (psi.kind() == GPhiKind::Power && std::isinf(pr.p)) floor = std::max(floor, x.value / pr.coeff);
    }
    if (floor > 0.0) {
        auto inside = [&](double lambda) {
            for (const auto& x : e) {
                const auto& pr = psi.profile(x.profile);
                if (std::isinf(pr.p) && !(x.value / lambda <= pr.coeff)) return false;
            }
            return true;
        };
        while (!inside(floor)) floor = std::nextafter(floor, kInf);
        if (rho(floor) <= 1.0) return floor;
    }
    double seed = vmax * std::pow(support * volume, 1.0 / psi.growth_exponent());
    if (!(seed > 0.0) || std::isinf(seed)) seed = vmax;
    seed = std::max(seed, floor);

    double lo, hi;
    if (rho(seed) <= 1.0) {
        hi = seed;
        lo = std::max(seed / 2.0, floor);
        while (rho(lo) <= 1.0) {
            if (lo <= floor || lo < std::numeric_limits<double>::min()) return lo;
            hi = lo;
            lo = std::max(lo / 2.0, floor);
        }
    } else {
        lo = seed;
        hi = seed * 2.0;
        while (rho(hi) > 1.0) {
            lo = hi;
            hi *= 2.0;
            if (std::isinf(hi)) return kInf;
        }
    }
    int steps = 0;
    while (hi / lo - 1.0 > opt.relative_tolerance) {
        if (++steps > opt.max_bisection_steps) throw ConvergenceError("Luxemburg bisection did not converge");
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (!(mid > lo && mid < hi)) break;
        (rho(mid) <= 1.0 ? hi : lo) = mid;
    }
    return hi;
}

std::vector<Index> all_cells(const Domain& dom) {
    std::vector<Index> c(static_cast<std::size_t>(dom.cell_count()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<Index>(i);
    return c;
}

void require_domain(const GPhiFunction& psi, const Domain& dom) {
    if (!(psi.domain() == dom)) throw PreconditionError("function and Phi-function live on different domains");
}

struct Maximiser {
    double value;
    double argmax;
};

// sup_{t >= 0} (t u - Psi(t)) for convex Psi, bracketing by doubling from `start`.
template <class Psi>
Maximiser legendre_sup(Psi&& psi, double u, double start) {
    auto g = [&](double t) { return t * u - psi(t); };
    double s = std::max(start, 1e-300);
    if (g(2.0 * s) > g(s)) {
        while (g(2.0 * s) > g(s)) {
            s *= 2.0;
            if (s > 1e300) return {kInf, kInf};
        }
    } else {
        while (s > 1e-300 && g(s / 2.0) >= g(s)) s /= 2.0;
        if (s <= 1e-300) return {std::max(0.0, g(s)), 0.0};
    }
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = s / 2.0, b = 2.0 * s;
    double c = b - r * (b - a), d = a + r * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 200 && (b - a) > 1e-8 * b; ++it) {
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if (gc >= gd) return {std::max(0.0, gc), c};
    return {std::max(0.0, gd), d};
}

std::string t_witness(Index cell, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "cell %lld t=%.17g", static_cast<long long>(cell), t);
    return buf;
}

}  // namespace

const std::array<double, 512>& GPhiFunction::numeric_nodes() {
    static const std::array<double, 512> nodes = [] {
        std::array<double, 512> x{};
        for (int k = 0; k < 512; ++k) x[static_cast<std::size_t>(k)] = std::exp2((k - 256) / 12.0);
        return x;
    }();
    return nodes;
}

void GPhiFunction::assign_profiles(const std::vector<Profile>& per_cell) {
    std::unordered_map<ProfileKey, std::int32_t, ProfileKeyHash> index;
    cell_profile_.resize(per_cell.size());
    for (std::size_t c = 0; c < per_cell.size(); ++c) {
        const auto& pr = per_cell[c];
        const ProfileKey key{bits(pr.p), bits(pr.q), bits(pr.coeff), pr.table};
        auto [it, inserted] = index.try_emplace(key, static_cast<std::int32_t>(profiles_.size()));
        if (inserted) {
            profiles_.push_back(pr);
            representatives_.push_back(static_cast<Index>(c));
        }
        cell_profile_[c] = it->second;
    }
}

GPhiFunction GPhiFunction::power(const ExponentFunction& p) {
    return power(p, Eigen::ArrayXd::Ones(p.values().size()));
}

GPhiFunction GPhiFunction::power(const ExponentFunction& p, const Eigen::ArrayXd& coeff) {
    if (coeff.size() != p.values().size()) throw PreconditionError("coefficient size mismatch");
    if (!(coeff > 0.0).all() || !coeff.isFinite().all())
        throw PreconditionError("power coefficients must be positive and finite");
    GPhiFunction f(GPhiKind::Power, p.domain());
    std::vector<Profile> per(static_cast<std::size_t>(coeff.size()));
    for (Index c = 0; c < coeff.size(); ++c) per[static_cast<std::size_t>(c)] = {p[c], 0.0, coeff[c], -1};
    f.assign_profiles(per);
    f.growth_ = std::isinf(p.minus()) ? 1.0 : p.minus();
    f.has_inf_branch_ = p.has_infinity();
    return f;
}

GPhiFunction GPhiFunction::power_log(const ExponentFunction& p, const GridFunction& q) {
    if (!(p.domain() == q.domain())) throw PreconditionError("p and q live on different domains");
    if (p.has_infinity()) throw PreconditionError("power_log requires a finite exponent");
    if (!q.values().isFinite().all()) throw PreconditionError("log exponent must be finite");
    GPhiFunction f(GPhiKind::PowerLog, p.domain());
    std::vector<Profile> per(static_cast<std::size_t>(q.size()));
    for (Index c = 0; c < q.size(); ++c) {
        if (p[c] == 1.0 && q[c] < 0.0) throw PreconditionError("t log(e+t)^q with q < 0 is not convex");
        per[static_cast<std::size_t>(c)] = {p[c], q[c], 1.0, -1};
    }
    f.assign_profiles(per);
    f.growth_ = p.minus();
    return f;
}

GPhiFunction GPhiFunction::linear_log(const Domain& dom) {
    GPhiFunction f(GPhiKind::LinearLog, dom);
    f.assign_profiles(std::vector<Profile>(static_cast<std::size_t>(dom.cell_count()), Profile{1.0, 1.0, 1.0, -1}));
    return f;
}

GPhiFunction GPhiFunction::numeric(const Domain& dom, std::vector<std::vector<double>> tables,
                                   std::vector<std::int32_t> cell_table) {
    if (static_cast<Index>(cell_table.size()) != dom.cell_count()) throw PreconditionError("cell table size mismatch");
    for (const auto& t : tables) {
        if (t.size() != kNodes) throw PreconditionError("numeric table must have 512 entries");
        for (double v : t)
            if (std::isnan(v) || v < 0.0) throw PreconditionError("numeric table values must be non-negative");
    }
    GPhiFunction f(GPhiKind::Numeric, dom);
    std::vector<Profile> per(cell_table.size());
    for (std::size_t c = 0; c < cell_table.size(); ++c) {
        if (cell_table[c] < 0 || static_cast<std::size_t>(cell_table[c]) >= tables.size())
            throw PreconditionError("cell refers to a missing table");
        per[c] = {1.0, 0.0, 1.0, cell_table[c]};
    }
    f.assign_profiles(per);
    f.tables_ = std::make_shared<const std::vector<std::vector<double>>>(std::move(tables));
    return f;
}

GPhiFunction GPhiFunction::tabulate(const GPhiFunction& psi) {
    const auto& x = numeric_nodes();
    std::vector<std::vector<double>> tables(psi.profile_count(), std::vector<double>(kNodes));
    for (std::size_t i = 0; i < tables.size(); ++i)
        for (std::size_t k = 0; k < kNodes; ++k) tables[i][k] = psi.eval_profile(static_cast<std::int32_t>(i), x[k]);
    std::vector<std::int32_t> map(static_cast<std::size_t>(psi.domain().cell_count()));
    for (std::size_t c = 0; c < map.size(); ++c) map[c] = psi.profile_of(static_cast<Index>(c));
    GPhiFunction f = numeric(psi.domain(), std::move(tables), std::move(map));
    f.growth_ = psi.growth_;
    return f;
}

double GPhiFunction::eval_profile(std::int32_t profile, double t) const {
    const Profile& pr = profiles_[static_cast<std::size_t>(profile)];
    if (!(t > 0.0)) return 0.0;
    switch (kind_) {
        case GPhiKind::Power:
            if (std::isinf(pr.p)) return t <= pr.coeff ? 0.0 : kInf;
            if (pr.p == 1.0) return pr.coeff * t;
            if (pr.p == 2.0) return pr.coeff * t * t;
            return pr.coeff * std::pow(t, pr.p);
        case GPhiKind::PowerLog: {
            const double base = pr.p == 1.0 ? t : std::pow(t, pr.p);
            if (pr.q == 0.0) return base;
            const double l = std::log(std::numbers::e + t);
            return base * (pr.q == 1.0 ? l : std::pow(l, pr.q));
        }
        case GPhiKind::LinearLog:
            return t * std::log(std::numbers::e + t);
        case GPhiKind::Numeric:
            return table_eval((*tables_)[static_cast<std::size_t>(pr.table)], t);
    }
    return 0.0;
}

double GPhiFunction::infinite_threshold(Index cell) const {
    const Profile& pr = profiles_[static_cast<std::size_t>(profile_of(cell))];
    if (kind_ == GPhiKind::Power && std::isinf(pr.p)) return pr.coeff;
    return kInf;
}

double modular(const GPhiFunction& psi, const Eigen::ArrayXd& values, double lambda) {
    if (values.size() != psi.domain().cell_count()) throw PreconditionError("value array size mismatch");
    if (!(lambda > 0.0)) throw PreconditionError("modular requires lambda > 0");
    std::vector<double> buf(static_cast<std::size_t>(values.size()));
    for (Index c = 0; c < values.size(); ++c) {
        const double v = psi(c, std::fabs(values[c]) / lambda);
        if (std::isinf(v)) return kInf;
        buf[static_cast<std::size_t>(c)] = v;
    }
    return pairwise_sum(buf) * psi.domain().cell_volume();
}

double modular(const GPhiFunction& psi, const GridFunction& f, double lambda) {
    require_domain(psi, f.domain());
    return modular(psi, f.values(), lambda);
}

double norm_on_cells(const GPhiFunction& psi, std::span<const Index> cells, std::span<const double> values,
                     const NormOptions& opt) {
    if (cells.size() != values.size()) throw PreconditionError("cells and values differ in length");
    return entries_norm(psi, collect_entries(psi, cells, values), opt);
}

double luxemburg_norm(const GPhiFunction& psi, const Eigen::ArrayXd& values, const NormOptions& opt) {
    if (values.size() != psi.domain().cell_count()) throw PreconditionError("value array size mismatch");
    const auto cells = all_cells(psi.domain());
    return norm_on_cells(psi, cells, std::span<const double>(values.data(), static_cast<std::size_t>(values.size())),
                         opt);
}

double luxemburg_norm(const GPhiFunction& psi, const GridFunction& f, const NormOptions& opt) {
    require_domain(psi, f.domain());
    return luxemburg_norm(psi, f.values(), opt);
}

double cube_norm(const GPhiFunction& psi, const Eigen::ArrayXd& values, const DyadicCube& q, const NormOptions& opt) {
    const auto cells = cube_cells(q, psi.domain());
    std::vector<double> v(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) v[i] = values[cells[i]];
    return norm_on_cells(psi, cells, v, opt);
}

double indicator_norm(const GPhiFunction& psi, const DyadicCube& q, const NormOptions& opt) {
    const auto cells = cube_cells(q, psi.domain());
    const std::vector<double> ones(cells.size(), 1.0);
    return norm_on_cells(psi, cells, ones, opt);
}

double weighted_norm(const GPhiFunction& psi, const GridFunction& f, const GridFunction& w, const NormOptions& opt) {
    require_domain(psi, f.domain());
    require_domain(psi, w.domain());
    return luxemburg_norm(psi, Eigen::ArrayXd(f.values() * w.values()), opt);
}

double lp_norm(const ExponentFunction& p, const GridFunction& f, const NormOptions& opt) {
    return luxemburg_norm(GPhiFunction::power(p), f, opt);
}

GPhiFunction conjugate_gphi(const GPhiFunction& psi) {
    const Domain& dom = psi.domain();
    const Index N = dom.cell_count();
    if (psi.kind() == GPhiKind::Power) {
        Eigen::ArrayXd pc(N), cc(N);
        for (Index c = 0; c < N; ++c) {
            const auto& pr = psi.profile(psi.profile_of(c));
            if (std::isinf(pr.p)) {
                pc[c] = 1.0;
                cc[c] = pr.coeff;
            } else if (pr.p == 1.0) {
                pc[c] = kInf;
                cc[c] = pr.coeff;
            } else {
                const double q = conjugate_exponent(pr.p);
                pc[c] = q;
                cc[c] = (pr.p - 1.0) * std::pow(pr.p, -q) * std::pow(pr.coeff, -(q - 1.0));
            }
        }
        return GPhiFunction::power(ExponentFunction(GridFunction(dom, std::move(pc))), cc);
    }
    const auto& x = GPhiFunction::numeric_nodes();
    std::vector<std::vector<double>> tables(psi.profile_count(), std::vector<double>(kNodes));
    parallel_for(static_cast<std::int64_t>(tables.size()), [&](std::int64_t i) {
        const auto pid = static_cast<std::int32_t>(i);
        auto f = [&](double t) { return psi.eval_profile(pid, t); };
        double start = 1.0;
        auto& row = tables[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < kNodes; ++k) {
            const Maximiser m = legendre_sup(f, x[k], start);
            row[k] = m.value;
            if (m.argmax > 0.0 && std::isfinite(m.argmax)) start = m.argmax;
        }
    });
    std::vector<std::int32_t> map(static_cast<std::size_t>(N));
    for (Index c = 0; c < N; ++c) map[static_cast<std::size_t>(c)] = psi.profile_of(c);
    return GPhiFunction::numeric(dom, std::move(tables), std::move(map));
}

double inverse_profile(const GPhiFunction& psi, std::int32_t profile, double t) {
    if (std::isnan(t) || t < 0.0) throw PreconditionError("inverse requires t >= 0");
    if (t == 0.0) return 0.0;
    const auto& pr = psi.profile(profile);
    if (psi.kind() == GPhiKind::Power) {
        if (std::isinf(pr.p)) return pr.coeff;
        if (std::isinf(t)) return kInf;
        return std::pow(t / pr.coeff, 1.0 / pr.p);
    }
    if (std::isinf(t)) return kInf;
    auto f = [&](double u) { return psi.eval_profile(profile, u); };
    double hi = 1.0;
    while (f(hi) < t) {
        hi *= 2.0;
        if (std::isinf(hi)) return kInf;
    }
    double lo = hi / 2.0;
    while (f(lo) >= t) {
        hi = lo;
        lo /= 2.0;
        if (lo < std::numeric_limits<double>::min()) return hi;
    }
    for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= t ? hi : lo) = mid;
    }
    return hi;
}

double inverse_gphi(const GPhiFunction& psi, Index cell, double t) {
    return inverse_profile(psi, psi.profile_of(cell), t);
}

ConditionFReport check_condition_F(const GPhiFunction& A, const GPhiFunction& B, const GPhiFunction& D, int kmin,
                                   int kmax, const std::vector<GridShift>& shifts) {
    const Domain& dom = D.domain();
    require_domain(A, dom);
    require_domain(B, dom);
    const GPhiFunction Dstar = conjugate_gphi(D);
    ConditionFReport r;
    std::vector<DyadicCube> cubes;
    for (const auto& s : shifts) {
        auto part = enumerate_cubes(dom, kmin, kmax, s);
        cubes.insert(cubes.end(), part.begin(), part.end());
    }
    std::vector<double> c1(cubes.size()), c3(cubes.size());
    parallel_for(static_cast<std::int64_t>(cubes.size()), [&](std::int64_t i) {
        const auto& q = cubes[static_cast<std::size_t>(i)];
        const double a = indicator_norm(A, q), b = indicator_norm(B, q), d = indicator_norm(D, q),
                     ds = indicator_norm(Dstar, q);
        if (!(d > 0.0) || std::isinf(d) || !(ds > 0.0) || std::isinf(ds))
            throw DomainError("degenerate indicator norm on " + cube_id(q, dom.dim()));
        c1[static_cast<std::size_t>(i)] = a * b / d;
        c3[static_cast<std::size_t>(i)] = d * ds / cube_measure(q, dom);
    });
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        if (c1[i] > r.c1) {
            r.c1 = c1[i];
            r.c1_witness = cube_id(cubes[i], dom.dim());
        }
        if (c3[i] > r.c3) {
            r.c3 = c3[i];
            r.c3_witness = cube_id(cubes[i], dom.dim());
        }
    }
    std::map<std::tuple<std::int32_t, std::int32_t, std::int32_t>, Index> triples;
    for (Index c = 0; c < dom.cell_count(); ++c)
        triples.try_emplace({A.profile_of(c), B.profile_of(c), D.profile_of(c)}, c);
    for (const auto& [key, cell] : triples) {
        for (int j = -40; j <= 40; ++j) {
            const double t = std::exp2(j / 2.0);
            const double v = inverse_profile(A, std::get<0>(key), t) * inverse_profile(B, std::get<1>(key), t) /
                             inverse_profile(D, std::get<2>(key), t);
            if (v > r.c2) {
                r.c2 = v;
                r.c2_witness = t_witness(cell, t);
            }
        }
    }
    return r;
}

double phi_axiom_defect(const GPhiFunction& psi) {
    const auto& x = GPhiFunction::numeric_nodes();
    double worst = 0.0;
    for (std::size_t i = 0; i < psi.profile_count(); ++i) {
        const auto pid = static_cast<std::int32_t>(i);
        double prev_v = 0.0, prev_slope = 0.0, prev_t = 0.0;
        for (std::size_t k = 0; k < kNodes; ++k) {
            const double v = psi.eval_profile(pid, x[k]);
            if (std::isinf(v)) break;
            const double scale = std::max(1.0, std::fabs(v));
            worst = std::max(worst, (prev_v - v) / scale);
            const double slope = (v - prev_v) / (x[k] - prev_t);
            worst = std::max(worst, (prev_slope - slope) / std::max(1.0, std::fabs(slope)) - 1e-12);
            prev_v = v;
            prev_slope = slope;
            prev_t = x[k];
        }
    }
    return std::max(worst, 0.0);
}

}  // namespace varsparse
