#pragma once

#include <cstdint>
#include <algorithm>
#include <random>

#include "varsparse/grid.hpp"

namespace varsparse {

/// splitmix64 step, used to derive independent per-trial seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Generator for trial `trial` of a run seeded with `seed`.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Uniform real in [lo, hi).
double uniform(std::mt19937_64& rng, double lo, double hi);
/// Log-uniform real in [lo, hi), lo > 0.
double log_uniform(std::mt19937_64& rng, double lo, double hi);

struct StepOptions {
    int level = -1;             // pieces are the level-k cubes of the standard grid
    double amp_lo = 0.1;        // amplitudes are log-uniform in [amp_lo, amp_hi)
    double amp_hi = 10.0;
    double zero_probability = 0.0;
    bool random_sign = false;
};

/// Cell-aligned random step function.
GridFunction random_step_function(const Domain& dom, std::mt19937_64& rng, const StepOptions& opt = {});

}  // namespace varsparse
