#pragma once

#include <Eigen/Core>
#include <cmath>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "varsparse/expr.hpp"

namespace varsparse {

using Index = std::int64_t;

/// Identifies one of the 3^n dyadic grids: per axis 0 (standard), 1 or 2
/// (the cell-aligned analogues of the 1/3 and 2/3 shifts).
using GridShift = std::array<int, 2>;

/// Uniform cell grid on the box [-2^L, 2^L)^n with cell side 2^-J.
class Domain {
public:
    static constexpr Index kDefaultCellBudget = Index{1} << 24;

    Domain(int n, int L, int J, GridShift shift = {0, 0}, Index cell_budget = kDefaultCellBudget);

    int dim() const { return n_; }
    int L() const { return L_; }
    int J() const { return J_; }
    GridShift shift() const { return shift_; }

    Index cells_per_axis() const { return Index{1} << (L_ + J_ + 1); }
    Index cell_count() const;
    double cell_side() const { return std::ldexp(1.0, -J_); }
    double cell_volume() const { return std::ldexp(1.0, -J_ * n_); }
    double box_side() const { return std::ldexp(1.0, L_ + 1); }
    double box_volume() const { return std::ldexp(1.0, (L_ + 1) * n_); }

    /// Coordinate of the centre of cell `i` along one axis.
    double center(Index i) const { return -std::ldexp(1.0, L_) + (static_cast<double>(i) + 0.5) * cell_side(); }
    std::array<Index, 2> cell_coords(Index cell) const;
    Index cell_index(std::array<Index, 2> coords) const;
    /// Centre of a cell as a point of R^n.
    std::array<double, 2> cell_center(Index cell) const;

    /// Offset (in cells, possibly negative) of the level-k lattice of a shifted grid.
    Index lattice_offset(int level, int shift_id) const;

    Domain with_resolution(int J) const { return Domain(n_, L_, J, shift_, budget_); }

    friend bool operator==(const Domain& a, const Domain& b) {
        return a.n_ == b.n_ && a.L_ == b.L_ && a.J_ == b.J_ && a.shift_ == b.shift_;
    }

private:
    int n_;
    int L_;
    int J_;
    GridShift shift_;
    Index budget_;
};

/// A cell-constant function on a Domain.
class GridFunction {
public:
    GridFunction(Domain dom, Eigen::ArrayXd values);

    static GridFunction constant(const Domain& dom, double c);

    const Domain& domain() const { return dom_; }
    const Eigen::ArrayXd& values() const { return values_; }
    double operator[](Index cell) const { return values_[cell]; }
    Index size() const { return values_.size(); }

private:
    Domain dom_;
    Eigen::ArrayXd values_;
};

/// A cube of one of the dyadic grids, aligned to cells. Side 2^level.
struct DyadicCube {
    int level = 0;
    Index side = 1;                 // side length in cells, 2^(level + J)
    std::array<Index, 2> corner{};  // lowest cell coordinates
    GridShift shift{0, 0};

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Stable textual id "s<shift>:k<level>:<corner>" used in reports.
std::string cube_id(const DyadicCube& q, int n);
Index cube_cell_count(const DyadicCube& q, int n);
double cube_measure(const DyadicCube& q, const Domain& dom);
bool cube_contains(const DyadicCube& outer, const DyadicCube& inner);
bool cube_contains_cell(const DyadicCube& q, std::array<Index, 2> coords, int n);
/// Linear indices of the cells of q (axis 0 fastest).
std::vector<Index> cube_cells(const DyadicCube& q, const Domain& dom);
/// The 2^n children; requires side > 1.
std::vector<DyadicCube> cube_children(const DyadicCube& q, int n);
/// The parent in the same grid, if it lies inside the box.
std::optional<DyadicCube> cube_parent(const DyadicCube& q, const Domain& dom);
/// The cube of the given level containing a cell, if inside the box.
std::optional<DyadicCube> cube_at(const Domain& dom, int level, std::array<Index, 2> coords, GridShift shift);

/// Samples an expression at every cell centre.
GridFunction sample(const Expression& expr, const Domain& dom);
GridFunction sample(std::string_view src, const Domain& dom);

/// Balanced-tree summation in a fixed order.
double pairwise_sum(std::span<const double> v);

/// Sum over cells of value * cell volume.
double integrate(const GridFunction& f);
double integrate(const Eigen::ArrayXd& values, const Domain& dom);
double cube_integral(const Eigen::ArrayXd& values, const DyadicCube& q, const Domain& dom);
double cube_average(const GridFunction& f, const DyadicCube& q);
double cube_average(const Eigen::ArrayXd& values, const DyadicCube& q, const Domain& dom);

/// All cubes of the grid `shift` with kmin <= level <= kmax lying inside the
/// box, ordered by level then lexicographic corner.
std::vector<DyadicCube> enumerate_cubes(const Domain& dom, int kmin, int kmax, GridShift shift);
std::vector<DyadicCube> enumerate_cubes(const Domain& dom, int kmin, int kmax);
/// Every shift vector of the 3^n grids (or only the standard grid).
std::vector<GridShift> all_shifts(int n);

/// Which cubes a supremum ranges over. Empty shifts means every grid.
struct CubeUniverse {
    std::optional<int> kmin, kmax;
    std::vector<GridShift> shifts;
};

std::vector<DyadicCube> cube_universe(const Domain& dom, const CubeUniverse& u = {});

/// Indicator of a cube as a grid function.
GridFunction indicator(const DyadicCube& q, const Domain& dom);

/// CSV with header "k,i1[,i2],value" plus a JSON sidecar with the domain.
void save_grid_function(const GridFunction& f, const std::string& csv_path);
GridFunction load_grid_function(const std::string& csv_path);
std::string domain_to_json(const Domain& dom);
Domain domain_from_json(const std::string& text);

}  // namespace varsparse
