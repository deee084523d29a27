#include "varsparse/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "varsparse/error.hpp"
#include "varsparse/expr.hpp"
#include "varsparse/harness/suites.hpp"

namespace varsparse {

namespace {

using json = nlohmann::json;

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

int get_int(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return j.get<int>();
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    return j.get<double>();
}

std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(where + " must be a string");
    return j.get<std::string>();
}

void only_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!contains(allowed, it.key())) throw ConfigError("unknown field " + where + "." + it.key());
}

}  // namespace

const std::vector<std::string>& known_expression_names() {
    static const std::vector<std::string> names{"p", "q", "r", "w", "mu", "lambda", "b", "eta", "delta",
                                                "log_power"};
    return names;
}

const std::vector<std::string>& known_param_names() {
    static const std::vector<std::string> names{"S", "R", "m", "alpha", "a_delta", "threshold", "sigma",
                                                "p_inf", "r_inf"};
    return names;
}

const std::vector<std::string>& known_tolerance_names() {
    static const std::vector<std::string> names{
        "constant_exponent", "unit_modular", "lemma_326", "holder", "holder_exact", "norm_product",
        "norm_product_constant", "commutator_identity", "self_adjoint", "stability", "prop32", "factores",
        "remark"};
    return names;
}

double ExperimentConfig::param(const std::string& name, double fallback) const {
    const auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
}

int ExperimentConfig::order(int fallback) const {
    if (const auto it = params.find("m"); it != params.end()) return static_cast<int>(it->second);
    return op.m.value_or(fallback);
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

std::string ExperimentConfig::expression(const std::string& name, const std::string& fallback) const {
    const auto it = expressions.find(name);
    return it == expressions.end() ? fallback : it->second;
}

GridFunction ExperimentConfig::sample_expression(const std::string& name, const std::string& fallback,
                                                 const Domain& dom) const {
    return sample(expression(name, fallback), dom);
}

ExponentFunction ExperimentConfig::exponent(const std::string& name, const std::string& fallback,
                                            const Domain& dom) const {
    return ExponentFunction(sample_expression(name, fallback, dom));
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(j,
              {"version", "domain", "sweep", "expressions", "params", "operator", "suite", "trials", "seed", "slack",
               "tolerances", "output"},
              "config");
    if (!j.contains("version")) throw ConfigError("config.version is required");
    if (get_int(j["version"], "version", "config") != 1) throw ConfigError("unsupported config version");

    ExperimentConfig c;
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        only_keys(d, {"n", "L", "J"}, "domain");
        if (d.contains("n")) c.n = get_int(d["n"], "n", "domain");
        if (d.contains("L")) c.L = get_int(d["L"], "L", "domain");
        if (d.contains("J")) c.J = get_int(d["J"], "J", "domain");
    }
    if (j.contains("sweep")) {
        if (!j["sweep"].is_array()) throw ConfigError("sweep must be an array of resolutions");
        for (const auto& x : j["sweep"]) c.sweep.push_back(get_int(x, "sweep", "config"));
    }
    try {
        for (int J : c.resolutions()) (void)c.domain(J);
        (void)c.domain();
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("invalid domain: ") + e.what());
    }

    if (j.contains("expressions")) {
        only_keys(j["expressions"], known_expression_names(), "expressions");
        for (auto it = j["expressions"].begin(); it != j["expressions"].end(); ++it) {
            const auto src = get_string(it.value(), "expressions." + it.key());
            try {
                (void)parse_expression(src, c.n);
            } catch (const SyntaxError& e) {
                throw ConfigError("expressions." + it.key() + ": " + e.what());
            }
            c.expressions[it.key()] = src;
        }
    }
    if (j.contains("params")) {
        only_keys(j["params"], known_param_names(), "params");
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
            c.params[it.key()] = get_number(it.value(), "params." + it.key());
        if (c.params.count("m") && !(c.params["m"] >= 0.0 && c.params["m"] == std::floor(c.params["m"])))
            throw ConfigError("params.m must be a non-negative integer");
    }
    if (j.contains("tolerances")) {
        only_keys(j["tolerances"], known_tolerance_names(), "tolerances");
        for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
            const double t = get_number(it.value(), "tolerances." + it.key());
            if (!(t > 0.0)) throw ConfigError("tolerances." + it.key() + " must be positive");
            c.tolerances[it.key()] = t;
        }
    }
    if (j.contains("operator")) {
        const auto& o = j["operator"];
        only_keys(o, {"kind", "kernel", "alpha", "m"}, "operator");
        if (o.contains("kind")) c.op.kind = get_string(o["kind"], "operator.kind");
        if (o.contains("kernel")) c.op.kernel = get_string(o["kernel"], "operator.kernel");
        if (o.contains("alpha")) c.op.alpha = get_number(o["alpha"], "operator.alpha");
        if (o.contains("m")) c.op.m = get_int(o["m"], "m", "operator");
        if (c.op.kind != "czo" && c.op.kind != "fractional") throw ConfigError("operator.kind must be czo or fractional");
        if (!c.op.kernel.empty() && c.op.kernel != "hilbert" && c.op.kernel != "riesz")
            throw ConfigError("operator.kernel must be hilbert or riesz");
        if ((c.op.kernel == "hilbert" && c.n != 1) || (c.op.kernel == "riesz" && c.n != 2))
            throw ConfigError("operator.kernel does not match domain.n");
        if (c.op.m && *c.op.m < 0) throw ConfigError("operator.m must be non-negative");
        if (c.op.kind == "fractional" && !(c.op.alpha > 0.0 && c.op.alpha < c.n))
            throw ConfigError("operator.alpha must lie in (0, n)");
    }
    if (j.contains("suite")) {
        c.suite = get_string(j["suite"], "suite");
        if (!is_registered_suite(c.suite)) throw ConfigError("unknown suite " + c.suite);
    }
    if (j.contains("trials")) {
        c.trials = get_int(j["trials"], "trials", "config");
        if (c.trials < 0) throw ConfigError("trials must be non-negative");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
            throw ConfigError("seed must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("slack")) {
        c.slack = get_number(j["slack"], "slack");
        if (!(c.slack >= 1.0)) throw ConfigError("slack must be at least 1");
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        only_keys(o, {"csv", "summary", "svg"}, "output");
        if (o.contains("csv")) c.csv_path = get_string(o["csv"], "output.csv");
        if (o.contains("summary")) c.summary_path = get_string(o["summary"], "output.summary");
        if (o.contains("svg")) c.svg_path = get_string(o["svg"], "output.svg");
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return parse_config(s.str());
}

}  // namespace varsparse
