#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "varsparse/harness/config.hpp"
#include "varsparse/harness/report.hpp"
#include "varsparse/random.hpp"

namespace varsparse::detail {

inline ReportRow row(const std::string& suite, const std::string& check, double constant, std::string witness,
                     int J, std::uint64_t seed, bool pass, std::string note = {}) {
    ReportRow r;
    r.suite = suite;
    r.check = check;
    r.constant = constant;
    r.witness = std::move(witness);
    r.J = J;
    r.seed = seed;
    r.pass = pass;
    r.note = std::move(note);
    return r;
}

inline std::vector<int> sweep_or(const ExperimentConfig& c, std::vector<int> fallback) {
    return c.sweep.empty() ? fallback : c.sweep;
}

/// Integer in [lo, hi].
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    const int v = lo + static_cast<int>(std::floor(uniform(rng, 0.0, hi - lo + 1.0)));
    return std::min(v, hi);
}

/// Random step function on pieces of a random level between the cell and the box.
inline GridFunction random_test_function(const Domain& dom, std::mt19937_64& rng, bool sign, double zeros = 0.0) {
    StepOptions opt;
    opt.level = uniform_int(rng, -dom.J(), dom.L());
    opt.random_sign = sign;
    opt.zero_probability = zeros;
    auto f = random_step_function(dom, rng, opt);
    if (f.values().abs().maxCoeff() == 0.0) {
        Eigen::ArrayXd v = f.values();
        v[0] = 1.0;
        return GridFunction(dom, std::move(v));
    }
    return f;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

inline std::string trial_witness(std::size_t t) { return "trial " + std::to_string(t); }

}  // namespace varsparse::detail
