#include "varsparse/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <json.hpp>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "varsparse/error.hpp"
#include "varsparse/gphi.hpp"
#include "varsparse/parallel.hpp"
#include "varsparse/weights.hpp"

namespace varsparse {

namespace {

std::uint64_t cube_key(const DyadicCube& q) {
    return (static_cast<std::uint64_t>(q.level + 64) << 52) | (static_cast<std::uint64_t>(q.corner[0]) << 26) |
           static_cast<std::uint64_t>(q.corner[1]);
}

bool canonical_less(const DyadicCube& a, const DyadicCube& b) {
    return std::tie(b.level, a.corner[0], a.corner[1]) < std::tie(a.level, b.corner[0], b.corner[1]);
}

void require_single_grid(const SparseFamily& s) {
    for (const auto& q : s.cubes)
        if (q.shift != s.shift) throw PreconditionError("family mixes cubes from different grids");
}

// Family cubes containing each cell, coarse to fine (indices into s.cubes).
std::vector<std::vector<std::int32_t>> cell_chains(const SparseFamily& s) {
    std::vector<std::size_t> order(s.cubes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.cubes[a].level > s.cubes[b].level; });
    std::vector<std::vector<std::int32_t>> chains(static_cast<std::size_t>(s.domain.cell_count()));
    for (std::size_t i : order)
        for (Index c : cube_cells(s.cubes[i], s.domain))
            chains[static_cast<std::size_t>(c)].push_back(static_cast<std::int32_t>(i));
    return chains;
}

// <|b - m|>_R
double mean_abs_deviation(const GridFunction& b, double m, const DyadicCube& r) {
    const Domain& dom = b.domain();
    const auto cells = cube_cells(r, dom);
    std::vector<double> d(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) d[i] = std::fabs(b[cells[i]] - m);
    return pairwise_sum(d) / static_cast<double>(cells.size());
}

// Maximal descendants P of q (P != q) with pred(P) true.
template <class Pred>
void maximal_descendants(const DyadicCube& q, int n, Pred&& pred, std::vector<DyadicCube>& out) {
    if (q.side < 2) return;
    for (const auto& c : cube_children(q, n)) {
        if (pred(c))
            out.push_back(c);
        else
            maximal_descendants(c, n, pred, out);
    }
}

}  // namespace

void canonicalize(SparseFamily& s) { std::stable_sort(s.cubes.begin(), s.cubes.end(), canonical_less); }

std::vector<std::int32_t> finest_owner(const SparseFamily& s) {
    require_single_grid(s);
    std::vector<std::size_t> order(s.cubes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.cubes[a].level > s.cubes[b].level; });
    std::vector<std::int32_t> owner(static_cast<std::size_t>(s.domain.cell_count()), -1);
    for (std::size_t i : order)
        for (Index c : cube_cells(s.cubes[i], s.domain)) owner[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(i);
    return owner;
}

std::vector<std::vector<Index>> e_sets(const SparseFamily& s) {
    const auto owner = finest_owner(s);
    std::vector<std::vector<Index>> e(s.cubes.size());
    for (std::size_t c = 0; c < owner.size(); ++c)
        if (owner[c] >= 0) e[static_cast<std::size_t>(owner[c])].push_back(static_cast<Index>(c));
    return e;
}

SparsityReport verify_sparse(const SparseFamily& s) {
    const auto owner = finest_owner(s);
    SparsityReport r;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& q : s.cubes)
        if (!seen.insert(cube_key(q)).second) r.disjoint = false;
    std::vector<Index> e(s.cubes.size(), 0);
    for (auto o : owner)
        if (o >= 0) ++e[static_cast<std::size_t>(o)];
    const int n = s.domain.dim();
    for (std::size_t i = 0; i < s.cubes.size(); ++i) {
        const Index qc = cube_cell_count(s.cubes[i], n);
        const double ratio = static_cast<double>(e[i]) / static_cast<double>(qc);
        if (2 * e[i] < qc) r.sparse = false;
        if (i == 0 || ratio < r.min_ratio) {
            r.min_ratio = ratio;
            r.min_e_cells = e[i];
            r.min_q_cells = qc;
            r.witness = cube_id(s.cubes[i], n);
        }
    }
    return r;
}

SparseFamily cz_sparse(const GridFunction& f, const DyadicCube& root, double threshold) {
    const Domain& dom = f.domain();
    if (!(threshold >= 2.0)) throw PreconditionError("stopping threshold must be >= 2");
    if ((f.values() < 0.0).any()) throw PreconditionError("cz_sparse requires f >= 0");
    const double root_avg = cube_average(f, root);
    if (!(root_avg > 0.0)) throw PreconditionError("f vanishes on the root cube");
    SparseFamily s{dom, root.shift, {root}};
    std::deque<std::pair<DyadicCube, double>> queue{{root, root_avg}};
    const int n = dom.dim();
    while (!queue.empty()) {
        const auto [q, avg] = queue.front();
        queue.pop_front();
        std::vector<DyadicCube> stop;
        maximal_descendants(q, n, [&](const DyadicCube& p) { return cube_average(f, p) >= threshold * avg; }, stop);
        for (const auto& p : stop) {
            s.cubes.push_back(p);
            queue.emplace_back(p, cube_average(f, p));
        }
    }
    canonicalize(s);
    return s;
}

std::vector<DyadicCube> maximal_cubes(const Domain& dom, GridShift shift) {
    std::vector<DyadicCube> out;
    for (int k = dom.L() + 1; k >= -dom.J(); --k)
        for (const auto& q : enumerate_cubes(dom, k, k, shift))
            if (!cube_parent(q, dom)) out.push_back(q);
    return out;
}

SparseFamily cz_sparse_grid(const GridFunction& f, GridShift shift, double threshold) {
    const Domain& dom = f.domain();
    if (dom.dim() == 1) shift[1] = 0;
    SparseFamily s{dom, shift, {}};
    for (const auto& root : maximal_cubes(dom, shift)) {
        if (!(cube_average(f, root) > 0.0)) continue;
        auto part = cz_sparse(f, root, threshold);
        s.cubes.insert(s.cubes.end(), part.cubes.begin(), part.cubes.end());
    }
    canonicalize(s);
    return s;
}

SparseFamily oscillation_augment(const SparseFamily& s, const GridFunction& b) {
    require_single_grid(s);
    const Domain& dom = s.domain;
    if (!(b.domain() == dom)) throw PreconditionError("symbol and family live on different domains");
    const int n = dom.dim();
    std::unordered_set<std::uint64_t> original, alive;
    std::vector<DyadicCube> cubes;
    std::deque<DyadicCube> queue;
    for (const auto& q : s.cubes) {
        original.insert(cube_key(q));
        if (alive.insert(cube_key(q)).second) {
            cubes.push_back(q);
            queue.push_back(q);
        }
    }
    while (!queue.empty()) {
        const DyadicCube q = queue.front();
        queue.pop_front();
        const double mean = cube_average(b, q);
        const double osc = mean_abs_deviation(b, mean, q);
        if (!(osc > 0.0)) continue;
        std::vector<DyadicCube> stop;
        maximal_descendants(q, n, [&](const DyadicCube& r) { return mean_abs_deviation(b, mean, r) > 2.0 * osc; }, stop);
        for (const auto& r : stop)
            if (alive.insert(cube_key(r)).second) {
                cubes.push_back(r);
                queue.push_back(r);
            }
    }

    // Pruning, fine to coarse: while some E(Q) is below half of Q, drop the
    // largest added cube maximal inside Q, and finally Q itself if it was added.
    std::stable_sort(cubes.begin(), cubes.end(), [](const DyadicCube& a, const DyadicCube& c) { return a.level < c.level; });
    auto maximal_inside = [&](const DyadicCube& q) {
        std::vector<DyadicCube> out;
        maximal_descendants(q, n, [&](const DyadicCube& r) { return alive.count(cube_key(r)) > 0; }, out);
        return out;
    };
    for (const auto& q : cubes) {
        if (!alive.count(cube_key(q))) continue;
        const Index total = cube_cell_count(q, n);
        while (true) {
            const auto inner = maximal_inside(q);
            Index covered = 0;
            for (const auto& r : inner) covered += cube_cell_count(r, n);
            if (2 * (total - covered) >= total) break;
            const DyadicCube* victim = nullptr;
            for (const auto& r : inner)
                if (!original.count(cube_key(r)) && (!victim || r.side > victim->side)) victim = &r;
            if (!victim) {
                if (!original.count(cube_key(q))) alive.erase(cube_key(q));
                break;
            }
            alive.erase(cube_key(*victim));
        }
    }
    SparseFamily out{dom, s.shift, {}};
    for (const auto& q : cubes)
        if (alive.count(cube_key(q))) out.cubes.push_back(q);
    canonicalize(out);
    return out;
}

OscillationBound verify_oscillation_bound(const SparseFamily& s, const GridFunction& b) {
    require_single_grid(s);
    const Domain& dom = s.domain;
    std::vector<double> mean(s.cubes.size()), osc(s.cubes.size());
    for (std::size_t i = 0; i < s.cubes.size(); ++i) {
        mean[i] = cube_average(b, s.cubes[i]);
        osc[i] = mean_abs_deviation(b, mean[i], s.cubes[i]);
    }
    const auto chains = cell_chains(s);
    OscillationBound r;
    for (std::size_t c = 0; c < chains.size(); ++c) {
        const auto& chain = chains[c];
        // chain runs coarse to fine; accumulate from the finest cube upwards
        double acc = 0.0;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const auto i = static_cast<std::size_t>(*it);
            acc += osc[i];
            const double num = std::fabs(b[static_cast<Index>(c)] - mean[i]);
            if (num == 0.0) continue;
            const double ratio = acc > 0.0 ? num / acc : std::numeric_limits<double>::infinity();
            if (ratio > r.constant) {
                r.constant = ratio;
                r.witness = cube_id(s.cubes[i], dom.dim()) + " cell " + std::to_string(c);
            }
        }
    }
    return r;
}

namespace {

// sum over family cubes containing each cell of coef[Q] * field_Q(cell), coarse to fine
template <class Term>
GridFunction accumulate(const SparseFamily& s, Term&& term) {
    const auto chains = cell_chains(s);
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(s.domain.cell_count());
    parallel_for(static_cast<std::int64_t>(chains.size()), [&](std::int64_t c) {
        double acc = 0.0;
        for (auto i : chains[static_cast<std::size_t>(c)]) acc += term(static_cast<std::size_t>(i), static_cast<Index>(c));
        out[c] = acc;
    });
    return GridFunction(s.domain, std::move(out));
}

void require_family_domain(const SparseFamily& s, const Domain& dom) {
    if (!(s.domain == dom)) throw PreconditionError("function and family live on different domains");
}

}  // namespace

GridFunction apply_AS(const SparseFamily& s, const GridFunction& f) {
    require_family_domain(s, f.domain());
    std::vector<double> avg(s.cubes.size());
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = cube_average(f, s.cubes[i]);
    return accumulate(s, [&](std::size_t i, Index) { return avg[i]; });
}

GridFunction apply_Amh(const SparseFamily& s, const GridFunction& b, const GridFunction& f, int m, int h,
                       double alpha) {
    require_family_domain(s, f.domain());
    require_family_domain(s, b.domain());
    if (h < 0 || h > m) throw PreconditionError("apply_Amh requires 0 <= h <= m");
    const int n = s.domain.dim();
    if (!(alpha >= 0.0 && alpha < n)) throw PreconditionError("alpha must lie in [0, n)");
    std::vector<double> mean(s.cubes.size()), coef(s.cubes.size());
    for (std::size_t i = 0; i < s.cubes.size(); ++i) {
        const auto& q = s.cubes[i];
        mean[i] = cube_average(b, q);
        const auto cells = cube_cells(q, s.domain);
        std::vector<double> g(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const Index c = cells[j];
            g[j] = std::fabs(std::pow(b[c] - mean[i], h) * f[c]);
        }
        const double scale = alpha == 0.0 ? 1.0 : std::pow(cube_measure(q, s.domain), alpha / n);
        coef[i] = scale * pairwise_sum(g) / static_cast<double>(cells.size());
    }
    const int e = m - h;
    return accumulate(s, [&](std::size_t i, Index c) {
        return e == 0 ? coef[i] : std::pow(std::fabs(b[c] - mean[i]), e) * coef[i];
    });
}

GridFunction apply_Ibeta(const SparseFamily& s, const ExponentFunction& beta, const GridFunction& f) {
    require_family_domain(s, f.domain());
    require_family_domain(s, beta.domain());
    const auto B = GPhiFunction::power(beta);
    std::vector<double> coef(s.cubes.size());
    parallel_for(static_cast<std::int64_t>(coef.size()), [&](std::int64_t i) {
        const auto& q = s.cubes[static_cast<std::size_t>(i)];
        coef[static_cast<std::size_t>(i)] = indicator_norm(B, q) * cube_average(f, q);
    });
    return accumulate(s, [&](std::size_t i, Index) { return coef[i]; });
}

GridFunction apply_A_eta_iter(const SparseFamily& s, const GridFunction& eta, const GridFunction& f, int k) {
    if (k < 0) throw PreconditionError("iteration count must be non-negative");
    require_family_domain(s, eta.domain());
    GridFunction g = f;
    for (int i = 0; i < k; ++i) g = GridFunction(s.domain, eta.values() * apply_AS(s, g).values());
    return g;
}

Prop31Report verify_prop31(const SparseFamily& s, const GridFunction& b, const GridFunction& eta,
                           const GridFunction& delta, const GridFunction& f, int k) {
    if (k < 1) throw PreconditionError("verify_prop31 requires k >= 1");
    const Domain& dom = s.domain;
    Prop31Report r{0.0, {}, 0.0, oscillation_augment(s, b)};
    r.symbol_norm = bmo_eta_delta_norm(b, eta, delta).value;
    const GridFunction af(dom, f.values().abs());
    const auto iter = apply_A_eta_iter(r.augmented, eta, af, k);
    const auto Dn = GPhiFunction::power(exponent_from_delta(delta));
    for (const auto& q : r.augmented.cubes) {
        const double mean = cube_average(b, q);
        const Eigen::ArrayXd g = (b.values() - mean).abs().pow(k) * af.values();
        const double lhs = cube_integral(g, q, dom);
        if (lhs == 0.0) continue;
        const double rhs = std::pow(r.symbol_norm * indicator_norm(Dn, q), k) * cube_integral(iter.values(), q, dom);
        const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
        if (ratio > r.constant) {
            r.constant = ratio;
            r.witness = cube_id(q, dom.dim());
        }
    }
    return r;
}

std::string family_to_json(const SparseFamily& s) {
    nlohmann::ordered_json j;
    j["domain"] = nlohmann::ordered_json::parse(domain_to_json(s.domain));
    j["shift"] = {s.shift[0], s.shift[1]};
    j["cubes"] = nlohmann::ordered_json::array();
    for (const auto& q : s.cubes) j["cubes"].push_back(cube_id(q, s.domain.dim()));
    return j.dump(2);
}

DyadicCube parse_cube_id(const std::string& id, const Domain& dom) {
    // s<shift>:k<level>:<c0>[,<c1>]
    const auto bad = [&] { return ConfigError("malformed cube id '" + id + "'"); };
    const auto p1 = id.find(':'), p2 = id.find(':', p1 + 1);
    if (id.empty() || id[0] != 's' || p1 == std::string::npos || p2 == std::string::npos || id[p1 + 1] != 'k')
        throw bad();
    const std::string shift = id.substr(1, p1 - 1);
    DyadicCube q;
    if (static_cast<int>(shift.size()) != dom.dim()) throw bad();
    for (int a = 0; a < dom.dim(); ++a) {
        if (shift[static_cast<std::size_t>(a)] < '0' || shift[static_cast<std::size_t>(a)] > '2') throw bad();
        q.shift[static_cast<std::size_t>(a)] = shift[static_cast<std::size_t>(a)] - '0';
    }
    try {
        q.level = std::stoi(id.substr(p1 + 2, p2 - p1 - 2));
        const std::string corner = id.substr(p2 + 1);
        const auto comma = corner.find(',');
        q.corner[0] = std::stoll(corner.substr(0, comma));
        if (dom.dim() == 2) {
            if (comma == std::string::npos) throw bad();
            q.corner[1] = std::stoll(corner.substr(comma + 1));
        }
    } catch (const std::logic_error&) {
        throw bad();
    }
    if (q.level < -dom.J() || q.level > dom.L() + 1) throw bad();
    q.side = Index{1} << (q.level + dom.J());
    const auto check = cube_at(dom, q.level, q.corner, q.shift);
    if (!check || !(*check == q)) throw bad();
    return q;
}

SparseFamily family_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid family JSON: ") + e.what());
    }
    if (!j.contains("domain") || !j.contains("shift") || !j.contains("cubes")) throw ConfigError("family JSON misses fields");
    SparseFamily s{domain_from_json(j["domain"].dump()), {j["shift"][0].get<int>(), j["shift"][1].get<int>()}, {}};
    for (const auto& id : j["cubes"]) s.cubes.push_back(parse_cube_id(id.get<std::string>(), s.domain));
    require_single_grid(s);
    return s;
}

}  // namespace varsparse
