#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "varsparse/exponent.hpp"
#include "varsparse/grid.hpp"

namespace varsparse {

/// Operator selection for domination sweeps and theorem probes.
struct OperatorSpec {
    std::string kind = "czo";  // czo | fractional
    std::string kernel;        // hilbert | riesz; empty picks the model kernel of the dimension
    double alpha = 0.5;
    std::optional<int> m;
};

/// Validated experiment description (schema version 1, see docs/config_schema.md).
struct ExperimentConfig {
    int n = 1;
    int L = 0;
    int J = 8;
    std::vector<int> sweep;  // resolutions for J-sweeps; empty means {J}
    std::map<std::string, std::string> expressions;
    std::map<std::string, double> params;
    OperatorSpec op;
    std::string suite;
    int trials = 0;  // 0 selects the suite default
    std::uint64_t seed = 1;
    double slack = 8.0;
    std::map<std::string, double> tolerances;
    std::string csv_path, summary_path, svg_path;

    Domain domain() const { return Domain(n, L, J); }
    Domain domain(int j) const { return Domain(n, L, j); }
    std::vector<int> resolutions() const { return sweep.empty() ? std::vector<int>{J} : sweep; }
    int trials_or(int fallback) const { return trials > 0 ? trials : fallback; }
    double param(const std::string& name, double fallback) const;
    /// Commutator order: params.m, else operator.m, else `fallback`.
    int order(int fallback) const;
    double tolerance(const std::string& name, double fallback) const;
    /// Named expression, or `fallback` when the config does not set it.
    std::string expression(const std::string& name, const std::string& fallback) const;
    GridFunction sample_expression(const std::string& name, const std::string& fallback, const Domain& dom) const;
    ExponentFunction exponent(const std::string& name, const std::string& fallback, const Domain& dom) const;
};

/// Names accepted in "expressions", "params" and "tolerances".
const std::vector<std::string>& known_expression_names();
const std::vector<std::string>& known_param_names();
const std::vector<std::string>& known_tolerance_names();

/// Parses and validates JSON text; throws ConfigError with a message naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

}  // namespace varsparse
