#include "varsparse/random.hpp"

#include <cmath>

#include "varsparse/error.hpp"

namespace varsparse {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t state = seed ^ (trial * 0xD1B54A32D192ED03ull);
    splitmix64(state);
    return std::mt19937_64(splitmix64(state));
}

// std::uniform_real_distribution is implementation-defined; this mapping is not.
double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    if (!(lo > 0.0 && hi >= lo)) throw PreconditionError("log-uniform range must be positive");
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

GridFunction random_step_function(const Domain& dom, std::mt19937_64& rng, const StepOptions& opt) {
    const int level = std::clamp(opt.level, -dom.J(), dom.L() + 1);
    const auto cubes = enumerate_cubes(dom, level, level, {0, 0});
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(dom.cell_count());
    for (const auto& q : cubes) {
        double a = log_uniform(rng, opt.amp_lo, opt.amp_hi);
        if (opt.zero_probability > 0.0 && uniform(rng, 0.0, 1.0) < opt.zero_probability) a = 0.0;
        if (opt.random_sign && (rng() & 1u)) a = -a;
        for (Index c : cube_cells(q, dom)) v[c] = a;
    }
    return GridFunction(dom, std::move(v));
}

}  // namespace varsparse
