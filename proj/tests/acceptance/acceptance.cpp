#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "varsparse/error.hpp"
#include "varsparse/harness/config.hpp"
#include "varsparse/harness/report.hpp"
#include "varsparse/harness/suites.hpp"

using namespace varsparse;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

/// Largest constant among rows whose check starts with `prefix`.
double max_constant(const Report& r, const std::string& prefix) {
    double m = -1.0;
    for (const auto& row : r.rows)
        if (row.check.rfind(prefix, 0) == 0) m = std::max(m, row.constant);
    return m;
}

std::string failing_rows(const Report& r) {
    std::string s;
    for (const auto& row : r.rows)
        if (!row.pass) s += " [" + row.suite + ": " + row.check + " = " + format_number(row.constant) + "]";
    return s;
}

Outcome suite(const std::string& json, const std::vector<std::string>& shown) {
    const auto c = parse_config(json);
    const auto r = run_suite(c);
    std::string detail;
    for (const auto& prefix : shown) detail += prefix + " " + format_number(max_constant(r, prefix)) + "; ";
    return {r.passed(), detail + failing_rows(r)};
}

Outcome criterion_determinism() {
    const std::vector<std::string> configs{
        R"({"version":1,"suite":"lemma_326","trials":30,"seed":11})",
        R"({"version":1,"suite":"holder_musielak","trials":40,"seed":12})",
        R"({"version":1,"suite":"sparsity","trials":20,"seed":13})",
        R"({"version":1,"suite":"prop32","trials":20,"seed":14,"sweep":[6,8]})",
        R"({"version":1,"suite":"dominate_fractional","sweep":[6,8],"params":{"m":1},"seed":15})",
        R"({"version":1,"suite":"T1.4","sweep":[6,8],"trials":8,"seed":16})",
    };
    std::string detail;
    bool ok = true;
    for (const auto& json : configs) {
        const auto c = parse_config(json);
        setenv("VARSPARSE_THREADS", "1", 1);
        const auto a = run_suite(c);
        setenv("VARSPARSE_THREADS", "3", 1);
        const auto b = run_suite(c);
        const auto b2 = run_suite(c);
        unsetenv("VARSPARSE_THREADS");
        const bool same = a.csv() == b.csv() && b.csv() == b2.csv() && a.summary_json() == b.summary_json();
        ok = ok && same;
        detail += c.suite + (same ? " identical; " : " DIFFERS; ");
    }
    return {ok, detail + "1 and 3 worker threads"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "constant-exponent agreement", 10.0,
         [] {
             return suite(R"({"version":1,"suite":"constant_exponent","trials":100})", {"p=1.5", "p=2", "p=3"});
         }},
        {2, "unit-modular law", 0.0,
         [] { return suite(R"({"version":1,"suite":"unit_modular"})", {""}); }},
        {3, "||f^s||_p = ||f||_sp^s", 0.0,
         [] { return suite(R"({"version":1,"suite":"lemma_326","trials":100})", {"max relative defect"}); }},
        {4, "Hoelder inequalities with constant 2", 0.0,
         [] {
             const auto a = suite(R"({"version":1,"suite":"holder_pp","trials":1000})", {"variable p", "p=2"});
             const auto b = suite(R"({"version":1,"suite":"holder_musielak","trials":1000})", {"t log", "t^p"});
             return Outcome{a.pass && b.pass, a.detail + b.detail};
         }},
        {5, "norm product ||chi_Q||_p ||chi_Q||_p' / |Q|", 0.0,
         [] {
             return suite(R"({"version":1,"suite":"norm_product","sweep":[6,8,10]})",
                          {"min over cubes", "max over cubes", "variable p stability", "constant p"});
         }},
        {6, "sparsity of stopping and augmented families", 0.0,
         [] { return suite(R"({"version":1,"suite":"sparsity","trials":50})", {"cz_sparse", "oscillation_augment"}); }},
        {7, "commutator identity", 0.0,
         [] { return suite(R"({"version":1,"suite":"commutator_identity","trials":20})", {"max"}); }},
        {8, "sparse domination, Hilbert and fractional (alpha = 0.5), m = 0, 1, 2", 300.0,
         [] {
             const auto a = suite(R"({"version":1,"suite":"dominate_czo","sweep":[8,10,12],
                 "operator":{"kind":"czo","kernel":"hilbert"}})",
                                  {"m=0 consecutive", "m=1 consecutive", "m=2 consecutive"});
             const auto b = suite(R"({"version":1,"suite":"dominate_fractional","sweep":[8,10,12],
                 "operator":{"kind":"fractional","alpha":0.5}})",
                                  {"m=0 consecutive", "m=1 consecutive", "m=2 consecutive"});
             return Outcome{a.pass && b.pass, "czo: " + a.detail + "fractional: " + b.detail};
         }},
        {9, "fractional sparse operator probe, p = 2, q = 4, w = |x|^(1/5)", 0.0,
         [] {
             return suite(R"({"version":1,"suite":"prop32","trials":100,"expressions":{"p":"2","q":"4",
                 "w":"abs(x1)^0.2"}})",
                          {"[w]_A_pq growth", "max / median"});
         }},
        {10, "self-adjointness of A_S", 0.0,
         [] { return suite(R"({"version":1,"suite":"self_adjoint","trials":50})", {"relative"}); }},
        {11, "theorem pipelines T1.1, T1.4, T1.5", 900.0,
         [] {
             const auto a = suite(R"({"version":1,"suite":"T1.1"})", {"remark pair", "probe / (slack K_hyp)"});
             const auto b = suite(R"({"version":1,"suite":"T1.4","expressions":{"p":"2","q":"2.5"},
                 "params":{"m":1}})",
                                  {"probe / (slack K_hyp)"});
             const auto c = suite(R"({"version":1,"suite":"T1.5","expressions":{"p":"1.5","q":"6"},
                 "params":{"m":1,"alpha":0.5}})",
                                  {"probe / (slack K_hyp)"});
             return Outcome{a.pass && b.pass && c.pass, "T1.1: " + a.detail + "T1.4: " + b.detail + "T1.5: " + c.detail};
         }},
        {12, "determinism", 0.0, criterion_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0.0 && secs >= c.budget_seconds) {
            o.pass = false;
            o.detail += " over the time budget";
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %d: %s (%.1f s) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
