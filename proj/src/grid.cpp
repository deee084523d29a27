#include "varsparse/grid.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "varsparse/error.hpp"

namespace varsparse {

namespace {

Index floor_div(Index a, Index b) {
    Index q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Index positive_mod(Index a, Index b) { return a - floor_div(a, b) * b; }

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".json"; }

}  // namespace

Domain::Domain(int n, int L, int J, GridShift shift, Index cell_budget)
    : n_(n), L_(L), J_(J), shift_(shift), budget_(cell_budget) {
    if (n != 1 && n != 2) throw PreconditionError("dimension must be 1 or 2");
    if (L < 0) throw PreconditionError("box exponent L must be >= 0");
    if (J < 1) throw PreconditionError("resolution J must be >= 1");
    if (n * (L + J + 1) > 62) throw PreconditionError("grid too large");
    for (int a = 0; a < n; ++a)
        if (shift[a] < 0 || shift[a] > 2) throw PreconditionError("shift ids must be 0, 1 or 2");
    if (n == 1) shift_[1] = 0;
    if (cell_count() > cell_budget)
        throw PreconditionError("cell count " + std::to_string(cell_count()) + " exceeds budget " +
                                std::to_string(cell_budget));
}

Index Domain::cell_count() const { return Index{1} << (n_ * (L_ + J_ + 1)); }

std::array<Index, 2> Domain::cell_coords(Index cell) const {
    const Index N = cells_per_axis();
    if (n_ == 1) return {cell, 0};
    return {cell % N, cell / N};
}

Index Domain::cell_index(std::array<Index, 2> c) const {
    return n_ == 1 ? c[0] : c[0] + cells_per_axis() * c[1];
}

std::array<double, 2> Domain::cell_center(Index cell) const {
    const auto c = cell_coords(cell);
    return {center(c[0]), n_ == 2 ? center(c[1]) : 0.0};
}

// Successive levels are displaced by alternating +-(child side), so every
// shifted grid stays nested while its offset tends to 1/3 (or 2/3) of the side.
Index Domain::lattice_offset(int level, int shift_id) const {
    if (shift_id == 0) return 0;
    Index off = 0;
    for (int j = 1; j <= level + J_; ++j) {
        Index step = Index{1} << (j - 1);
        int sign = (j % 2 == 1) ? 1 : -1;
        if (shift_id == 2) sign = -sign;
        off += sign * step;
    }
    return off;
}

GridFunction::GridFunction(Domain dom, Eigen::ArrayXd values) : dom_(std::move(dom)), values_(std::move(values)) {
    if (values_.size() != dom_.cell_count())
        throw PreconditionError("value array length " + std::to_string(values_.size()) +
                                " does not match cell count " + std::to_string(dom_.cell_count()));
}

GridFunction GridFunction::constant(const Domain& dom, double c) {
    return GridFunction(dom, Eigen::ArrayXd::Constant(dom.cell_count(), c));
}

std::string cube_id(const DyadicCube& q, int n) {
    std::string s = "s" + std::to_string(q.shift[0]);
    if (n == 2) s += std::to_string(q.shift[1]);
    s += ":k" + std::to_string(q.level) + ":" + std::to_string(q.corner[0]);
    if (n == 2) s += "," + std::to_string(q.corner[1]);
    return s;
}

Index cube_cell_count(const DyadicCube& q, int n) { return n == 1 ? q.side : q.side * q.side; }

double cube_measure(const DyadicCube& q, const Domain& dom) {
    return static_cast<double>(cube_cell_count(q, dom.dim())) * dom.cell_volume();
}

bool cube_contains(const DyadicCube& outer, const DyadicCube& inner) {
    for (int a = 0; a < 2; ++a) {
        if (inner.corner[a] < outer.corner[a]) return false;
        if (inner.corner[a] + inner.side > outer.corner[a] + outer.side) return false;
    }
    return true;
}

bool cube_contains_cell(const DyadicCube& q, std::array<Index, 2> c, int n) {
    for (int a = 0; a < n; ++a)
        if (c[a] < q.corner[a] || c[a] >= q.corner[a] + q.side) return false;
    return true;
}

std::vector<Index> cube_cells(const DyadicCube& q, const Domain& dom) {
    std::vector<Index> cells;
    cells.reserve(static_cast<std::size_t>(cube_cell_count(q, dom.dim())));
    if (dom.dim() == 1) {
        for (Index i = 0; i < q.side; ++i) cells.push_back(q.corner[0] + i);
    } else {
        const Index N = dom.cells_per_axis();
        for (Index j = 0; j < q.side; ++j)
            for (Index i = 0; i < q.side; ++i) cells.push_back(q.corner[0] + i + N * (q.corner[1] + j));
    }
    return cells;
}

std::vector<DyadicCube> cube_children(const DyadicCube& q, int n) {
    if (q.side < 2) throw PreconditionError("single-cell cube has no children");
    const Index half = q.side / 2;
    std::vector<DyadicCube> out;
    for (int b = 0; b < (n == 1 ? 1 : 2); ++b)
        for (int a = 0; a < 2; ++a) {
            DyadicCube c = q;
            c.level = q.level - 1;
            c.side = half;
            c.corner[0] = q.corner[0] + a * half;
            c.corner[1] = q.corner[1] + b * half;
            out.push_back(c);
        }
    return out;
}

std::optional<DyadicCube> cube_at(const Domain& dom, int level, std::array<Index, 2> coords, GridShift shift) {
    if (level < -dom.J() || level > dom.L() + 1) return std::nullopt;
    DyadicCube q;
    q.level = level;
    q.side = Index{1} << (level + dom.J());
    q.shift = shift;
    if (dom.dim() == 1) q.shift[1] = 0;
    const Index N = dom.cells_per_axis();
    for (int a = 0; a < dom.dim(); ++a) {
        const Index rem = positive_mod(dom.lattice_offset(level, q.shift[a]), q.side);
        q.corner[a] = rem + floor_div(coords[a] - rem, q.side) * q.side;
        if (q.corner[a] < 0 || q.corner[a] + q.side > N) return std::nullopt;
    }
    return q;
}

std::optional<DyadicCube> cube_parent(const DyadicCube& q, const Domain& dom) {
    return cube_at(dom, q.level + 1, q.corner, q.shift);
}

GridFunction sample(const Expression& expr, const Domain& dom) {
    if (expr.dimension() != dom.dim())
        throw PreconditionError("expression dimension " + std::to_string(expr.dimension()) +
                                " does not match domain dimension " + std::to_string(dom.dim()));
    Eigen::ArrayXd values(dom.cell_count());
    for (Index c = 0; c < dom.cell_count(); ++c) {
        const auto x = dom.cell_center(c);
        try {
            values[c] = evaluate(expr, std::span<const double>(x.data(), static_cast<std::size_t>(dom.dim())));
        } catch (const DomainError& e) {
            const auto ij = dom.cell_coords(c);
            std::string where = "(" + std::to_string(ij[0]);
            if (dom.dim() == 2) where += "," + std::to_string(ij[1]);
            throw DomainError(std::string(e.what()) + " at cell " + where + ")");
        }
    }
    return GridFunction(dom, std::move(values));
}

GridFunction sample(std::string_view src, const Domain& dom) { return sample(parse_expression(src, dom.dim()), dom); }

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double integrate(const Eigen::ArrayXd& values, const Domain& dom) {
    return pairwise_sum(std::span<const double>(values.data(), static_cast<std::size_t>(values.size()))) *
           dom.cell_volume();
}

double integrate(const GridFunction& f) { return integrate(f.values(), f.domain()); }

double cube_integral(const Eigen::ArrayXd& values, const DyadicCube& q, const Domain& dom) {
    if (dom.dim() == 1)
        return pairwise_sum(std::span<const double>(values.data() + q.corner[0], static_cast<std::size_t>(q.side))) *
               dom.cell_volume();
    std::vector<double> buf;
    buf.reserve(static_cast<std::size_t>(q.side * q.side));
    for (Index c : cube_cells(q, dom)) buf.push_back(values[c]);
    return pairwise_sum(buf) * dom.cell_volume();
}

double cube_average(const Eigen::ArrayXd& values, const DyadicCube& q, const Domain& dom) {
    const Index N = dom.cells_per_axis();
    for (int a = 0; a < dom.dim(); ++a)
        if (q.corner[a] < 0 || q.corner[a] + q.side > N) throw PreconditionError("cube outside domain");
    return cube_integral(values, q, dom) / cube_measure(q, dom);
}

double cube_average(const GridFunction& f, const DyadicCube& q) { return cube_average(f.values(), q, f.domain()); }

std::vector<DyadicCube> enumerate_cubes(const Domain& dom, int kmin, int kmax, GridShift shift) {
    if (kmin < -dom.J() || kmax > dom.L() + 1 || kmin > kmax)
        throw PreconditionError("cube level range [" + std::to_string(kmin) + ", " + std::to_string(kmax) +
                                "] outside [-J, L+1]");
    const Index N = dom.cells_per_axis();
    std::vector<DyadicCube> out;
    for (int k = kmin; k <= kmax; ++k) {
        const Index side = Index{1} << (k + dom.J());
        std::array<std::vector<Index>, 2> starts;
        for (int a = 0; a < 2; ++a) {
            if (a >= dom.dim()) {
                starts[a] = {0};
                continue;
            }
            const Index rem = positive_mod(dom.lattice_offset(k, shift[a]), side);
            for (Index c = rem; c + side <= N; c += side) starts[a].push_back(c);
        }
        for (Index c0 : starts[0])
            for (Index c1 : starts[1]) {
                DyadicCube q;
                q.level = k;
                q.side = side;
                q.corner = {c0, c1};
                q.shift = {shift[0], dom.dim() == 2 ? shift[1] : 0};
                out.push_back(q);
            }
    }
    return out;
}

std::vector<DyadicCube> enumerate_cubes(const Domain& dom, int kmin, int kmax) {
    return enumerate_cubes(dom, kmin, kmax, dom.shift());
}

std::vector<GridShift> all_shifts(int n) {
    std::vector<GridShift> out;
    for (int a = 0; a < 3; ++a) {
        if (n == 1) {
            out.push_back({a, 0});
            continue;
        }
        for (int b = 0; b < 3; ++b) out.push_back({a, b});
    }
    return out;
}

std::vector<DyadicCube> cube_universe(const Domain& dom, const CubeUniverse& u) {
    const int kmin = u.kmin.value_or(-dom.J()), kmax = u.kmax.value_or(dom.L() + 1);
    const auto shifts = u.shifts.empty() ? all_shifts(dom.dim()) : u.shifts;
    std::vector<DyadicCube> out;
    for (const auto& s : shifts) {
        auto part = enumerate_cubes(dom, kmin, kmax, s);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

GridFunction indicator(const DyadicCube& q, const Domain& dom) {
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(dom.cell_count());
    for (Index c : cube_cells(q, dom)) v[c] = 1.0;
    return GridFunction(dom, std::move(v));
}

std::string domain_to_json(const Domain& dom) {
    nlohmann::json j;
    j["n"] = dom.dim();
    j["L"] = dom.L();
    j["J"] = dom.J();
    j["shift"] = dom.dim() == 1 ? nlohmann::json::array({dom.shift()[0]})
                                : nlohmann::json::array({dom.shift()[0], dom.shift()[1]});
    return j.dump();
}

Domain domain_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        GridShift shift{0, 0};
        if (j.contains("shift"))
            for (std::size_t a = 0; a < j["shift"].size() && a < 2; ++a) shift[a] = j["shift"][a].get<int>();
        return Domain(j.at("n").get<int>(), j.at("L").get<int>(), j.at("J").get<int>(), shift);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid domain JSON: ") + e.what());
    }
}

void save_grid_function(const GridFunction& f, const std::string& csv_path) {
    const Domain& dom = f.domain();
    std::ofstream out(csv_path);
    if (!out) throw Error("cannot write " + csv_path);
    out << (dom.dim() == 1 ? "k,i1,value\n" : "k,i1,i2,value\n");
    char buf[64];
    for (Index c = 0; c < dom.cell_count(); ++c) {
        const auto ij = dom.cell_coords(c);
        out << -dom.J() << ',' << ij[0] << ',';
        if (dom.dim() == 2) out << ij[1] << ',';
        std::snprintf(buf, sizeof buf, "%.17g", f[c]);
        out << buf << '\n';
    }
    std::ofstream side(sidecar_path(csv_path));
    if (!side) throw Error("cannot write " + sidecar_path(csv_path));
    side << domain_to_json(dom) << '\n';
}

GridFunction load_grid_function(const std::string& csv_path) {
    std::ifstream side(sidecar_path(csv_path));
    if (!side) throw Error("missing sidecar " + sidecar_path(csv_path));
    std::stringstream ss;
    ss << side.rdbuf();
    const Domain dom = domain_from_json(ss.str());
    std::ifstream in(csv_path);
    if (!in) throw Error("cannot read " + csv_path);
    std::string line;
    std::getline(in, line);
    Eigen::ArrayXd values = Eigen::ArrayXd::Constant(dom.cell_count(), std::nan(""));
    Index rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (static_cast<int>(fields.size()) != dom.dim() + 2) throw Error("malformed row in " + csv_path);
        std::array<Index, 2> ij{std::stoll(fields[1]), dom.dim() == 2 ? std::stoll(fields[2]) : 0};
        values[dom.cell_index(ij)] = std::stod(fields.back());
        ++rows;
    }
    if (rows != dom.cell_count()) throw Error("row count does not match domain in " + csv_path);
    return GridFunction(dom, std::move(values));
}

}  // namespace varsparse
