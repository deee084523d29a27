#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "varsparse/gphi.hpp"
#include "varsparse/harness/config.hpp"
#include "varsparse/harness/report.hpp"
#include "varsparse/random.hpp"

namespace varsparse {

/// Lemma-level suites runnable through verify_lemma.
const std::vector<std::string>& lemma_suite_ids();
/// T1.1, T1.2, T1.4, T1.5.
const std::vector<std::string>& theorem_ids();
/// dominate_czo, dominate_fractional.
const std::vector<std::string>& domination_suite_ids();
bool is_registered_suite(const std::string& id);

Report verify_lemma(const std::string& id, const ExperimentConfig& config);

/// Sup over cells of |T_b^m f| / sum over grids and h of A^{m,h}(b, f), per
/// resolution, for a fixed 10-function suite, plus the consecutive-J stability factor.
Report verify_sparse_domination(const std::string& kind, int m, const ExperimentConfig& config);

/// ||f w||_Psi.
struct NormSpace {
    GPhiFunction psi;
    GridFunction weight;
};

using GridOperator = std::function<GridFunction(const GridFunction&)>;

struct NormEstimate {
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    std::string witness;  // "trial <k>" or "cube <id>"
    std::vector<double> ratios;
};

/// Lower bound for the operator norm: max of ||(Op f) w_t||_t / ||f w_s||_s over
/// seeded random step functions and indicators of the adversarial cubes.
NormEstimate estimate_operator_norm(const GridOperator& op, const NormSpace& source, const NormSpace& target,
                                    int trials, std::uint64_t seed,
                                    const std::vector<DyadicCube>& adversarial = {});

/// Hypothesis audit, exponent bookkeeping and conclusion probe for one theorem.
Report verify_theorem(const std::string& id, const ExperimentConfig& config);

/// Dispatches on config.suite.
Report run_suite(const ExperimentConfig& config);

}  // namespace varsparse
