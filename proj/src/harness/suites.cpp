#include "varsparse/harness/suites.hpp"

#include <algorithm>

#include "varsparse/error.hpp"

namespace varsparse {

const std::vector<std::string>& domination_suite_ids() {
    static const std::vector<std::string> ids{"dominate_czo", "dominate_fractional"};
    return ids;
}

bool is_registered_suite(const std::string& id) {
    for (const auto* ids : {&lemma_suite_ids(), &theorem_ids(), &domination_suite_ids()})
        if (std::find(ids->begin(), ids->end(), id) != ids->end()) return true;
    return false;
}

Report run_suite(const ExperimentConfig& config) {
    const auto& id = config.suite;
    const auto& th = theorem_ids();
    if (std::find(th.begin(), th.end(), id) != th.end()) return verify_theorem(id, config);
    if (id == "dominate_czo" || id == "dominate_fractional") {
        const std::string kind = id == "dominate_czo" ? "czo" : "fractional";
        if (config.params.count("m") || config.op.m) return verify_sparse_domination(kind, config.order(0), config);
        Report r;
        for (int m = 0; m <= 2; ++m) r.append(verify_sparse_domination(kind, m, config));
        return r;
    }
    if (id.empty()) throw ConfigError("no suite selected");
    return verify_lemma(id, config);
}

}  // namespace varsparse
