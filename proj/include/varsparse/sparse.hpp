#pragma once

#include <string>
#include <vector>

#include "varsparse/exponent.hpp"
#include "varsparse/grid.hpp"

namespace varsparse {

/// Cubes of one dyadic grid. Kept in canonical order: coarse to fine, then by corner.
struct SparseFamily {
    Domain domain;
    GridShift shift{0, 0};
    std::vector<DyadicCube> cubes;
};

/// Sorts into canonical order (duplicates are kept).
void canonicalize(SparseFamily& s);

/// Finest family cube containing each cell (-1 if none), as indices into s.cubes.
std::vector<std::int32_t> finest_owner(const SparseFamily& s);

struct SparsityReport {
    Index min_e_cells = 0;  // |E(Q)| and |Q| in cells at the worst cube
    Index min_q_cells = 0;
    double min_ratio = 1.0;
    std::string witness;
    bool disjoint = true;
    bool sparse = true;  // 2|E(Q)| >= |Q| for every Q, in integer arithmetic
};

/// E(Q) = Q minus the smaller family cubes inside it.
SparsityReport verify_sparse(const SparseFamily& s);
/// Cell lists of every E(Q), aligned with s.cubes.
std::vector<std::vector<Index>> e_sets(const SparseFamily& s);

/// Calderon-Zygmund stopping family of f >= 0 below `root`: the stopping
/// children of Q are the maximal P in Q with <f>_P >= threshold <f>_Q.
SparseFamily cz_sparse(const GridFunction& f, const DyadicCube& root, double threshold = 2.0);
/// Union of cz_sparse over the maximal in-box cubes of a grid (roots with f = 0 on them are skipped).
SparseFamily cz_sparse_grid(const GridFunction& f, GridShift shift, double threshold = 2.0);
/// Maximal in-box cubes of a grid; they partition the box.
std::vector<DyadicCube> maximal_cubes(const Domain& dom, GridShift shift);

/// Adds the mean-oscillation stopping cubes of b: for every Q, the maximal
/// R in Q with <|b - b_Q|>_R > 2 <|b - b_Q|>_Q. Added cubes whose presence
/// would leave some E(Q) below half of Q are pruned, so the output stays
/// 1/2-sparse whenever the input is.
SparseFamily oscillation_augment(const SparseFamily& s, const GridFunction& b);

struct OscillationBound {
    double constant = 0.0;
    std::string witness;
};

/// max over Q in S and x in Q of |b(x) - b_Q| / sum_{R in S, x in R in Q} <|b - b_R|>_R.
OscillationBound verify_oscillation_bound(const SparseFamily& s, const GridFunction& b);

/// A_S f = sum_Q f_Q chi_Q.
GridFunction apply_AS(const SparseFamily& s, const GridFunction& f);
/// sum_Q |b(x) - b_Q|^(m-h) |Q|^(alpha/n) <|(b - b_Q)^h f|>_Q chi_Q(x).
GridFunction apply_Amh(const SparseFamily& s, const GridFunction& b, const GridFunction& f, int m, int h,
                       double alpha = 0.0);
/// sum_Q ||chi_Q||_beta f_Q chi_Q.
GridFunction apply_Ibeta(const SparseFamily& s, const ExponentFunction& beta, const GridFunction& f);
/// k-fold iterate of f -> eta A_S f.
GridFunction apply_A_eta_iter(const SparseFamily& s, const GridFunction& eta, const GridFunction& f, int k);

struct Prop31Report {
    double constant = 0.0;
    std::string witness;
    double symbol_norm = 0.0;
    SparseFamily augmented;
};

/// max over Q in the augmented family of
///   int_Q |b - b_Q|^k |f|  /  (||b||^k ||chi_Q||^k_{n/delta} int_Q (A)^k_eta |f|).
Prop31Report verify_prop31(const SparseFamily& s, const GridFunction& b, const GridFunction& eta,
                           const GridFunction& delta, const GridFunction& f, int k);

std::string family_to_json(const SparseFamily& s);
SparseFamily family_from_json(const std::string& text);
DyadicCube parse_cube_id(const std::string& id, const Domain& dom);

}  // namespace varsparse
