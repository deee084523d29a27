#include "varsparse/harness/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <json.hpp>

#include "varsparse/error.hpp"
#include "varsparse/gphi.hpp"
#include "varsparse/harness/config.hpp"
#include "varsparse/harness/report.hpp"
#include "varsparse/harness/suites.hpp"
#include "varsparse/sparse.hpp"
#include "varsparse/weights.hpp"

namespace varsparse {

namespace {

struct DomainArgs {
    int n = 1, L = 0, J = 8;
    void add(CLI::App* app) {
        app->add_option("--n", n, "dimension (1 or 2)")->capture_default_str();
        app->add_option("--L", L, "box [-2^L, 2^L)^n")->capture_default_str();
        app->add_option("--J", J, "cell side 2^-J")->capture_default_str();
    }
    Domain domain() const { return Domain(n, L, J); }
};

std::string error_summary(const std::string& message) {
    nlohmann::ordered_json j;
    j["passed"] = false;
    j["error"] = message;
    j["rows"] = nlohmann::ordered_json::array();
    return j.dump(2) + "\n";
}

/// Writes CSV, summary and SVG as configured and returns the exit code.
int emit(const Report& r, const ExperimentConfig& c, const std::string& summary_path, std::ostream& out) {
    const std::string csv = r.csv();
    if (c.csv_path.empty())
        out << csv;
    else
        write_text(c.csv_path, csv);
    write_text(c.summary_path.empty() ? summary_path : c.summary_path, r.summary_json());
    if (!c.svg_path.empty()) write_text(c.svg_path, ratio_plot_svg(r));
    for (const auto& row : r.rows)
        if (!row.pass) out << "FAIL " << row.suite << ": " << row.check << " = " << format_number(row.constant) << '\n';
    return r.passed() ? kExitPass : kExitCheckFailed;
}

/// Multiplies by the indicator of [0,1)^n (empty if the box does not contain it).
GridFunction restrict_to_unit_cube(const GridFunction& f) {
    const Domain& dom = f.domain();
    Eigen::ArrayXd v = f.values();
    for (Index i = 0; i < dom.cell_count(); ++i) {
        const auto x = dom.cell_center(i);
        for (int a = 0; a < dom.dim(); ++a)
            if (x[a] < 0.0 || x[a] >= 1.0) v[i] = 0.0;
    }
    return GridFunction(dom, std::move(v));
}

GPhiFunction make_psi(const std::string& kind, const ExponentFunction& p, const std::string& q_src) {
    const Domain& dom = p.domain();
    if (kind == "power") return GPhiFunction::power(p);
    if (kind == "power_log") return GPhiFunction::power_log(p, sample(q_src, dom));
    if (kind == "linear_log") return GPhiFunction::linear_log(dom);
    throw ConfigError("--psi must be power, power_log or linear_log");
}

GridShift parse_shift(const std::vector<int>& v) {
    GridShift s{0, 0};
    if (v.size() > 2) throw ConfigError("--shift takes at most two ids");
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i];
    return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Variable-exponent sparse domination experiments"};
    app.require_subcommand(1);
    std::string summary_path = "varsparse_summary.json";
    app.add_option("--summary", summary_path, "summary JSON path")->capture_default_str();

    auto* norm = app.add_subcommand("norm", "Luxemburg norm of a declared function");
    DomainArgs norm_dom;
    norm_dom.add(norm);
    std::string psi_kind = "power", p_src = "2", q_src = "0", f_src = "1", w_src;
    bool unit_cube = false;
    norm->add_option("--psi", psi_kind, "power | power_log | linear_log")->capture_default_str();
    norm->add_option("--p", p_src, "exponent p(x)")->capture_default_str();
    norm->add_option("--q", q_src, "log power q(x) for power_log")->capture_default_str();
    norm->add_option("--f", f_src, "function f(x)")->capture_default_str();
    norm->add_option("--w", w_src, "weight w(x); the norm of f w is reported");
    norm->add_flag("--unit-cube", unit_cube, "restrict f to [0,1)^n");

    auto* weights = app.add_subcommand("weights", "A_p and A_{p,q} constants of a weight");
    DomainArgs w_dom;
    w_dom.add(weights);
    std::string ww_src = "1", wp_src = "2", wq_src;
    weights->add_option("--w", ww_src, "weight w(x)")->capture_default_str();
    weights->add_option("--p", wp_src, "exponent p(x)")->capture_default_str();
    weights->add_option("--q", wq_src, "exponent q(x) >= p(x) for A_{p,q}");

    auto* sparse_cmd = app.add_subcommand("sparse", "build, verify and serialize sparse families");
    DomainArgs s_dom;
    s_dom.add(sparse_cmd);
    std::string sf_src = "1", sb_src, s_in, s_out;
    std::vector<int> shift_ids{0, 0};
    double threshold = 2.0;
    sparse_cmd->add_option("--f", sf_src, "f(x); |f| drives the stopping rule")->capture_default_str();
    sparse_cmd->add_option("--b", sb_src, "symbol b(x) for oscillation augmentation");
    sparse_cmd->add_option("--shift", shift_ids, "grid ids per axis")->expected(1, 2);
    sparse_cmd->add_option("--threshold", threshold, "stopping threshold")->capture_default_str();
    sparse_cmd->add_option("--in", s_in, "verify a family read from JSON instead of building one");
    sparse_cmd->add_option("--out", s_out, "write the family as JSON");

    auto* verify = app.add_subcommand("verify", "run a lemma or theorem suite");
    std::string suite_id, config_path;
    verify->add_option("id", suite_id, "suite id")->required();
    verify->add_option("--config", config_path, "experiment config (JSON)");

    auto* dominate = app.add_subcommand("dominate", "sparse-domination sweep");
    std::string dom_config, dom_kind = "czo";
    std::vector<int> dom_m;
    dominate->add_option("--config", dom_config, "experiment config (JSON)");
    dominate->add_option("--kind", dom_kind, "czo | fractional")->capture_default_str();
    dominate->add_option("--m", dom_m, "commutator orders (default operator.m, else 0 1 2)");

    auto* report = app.add_subcommand("report", "merge report CSVs and plot constants against J");
    std::vector<std::string> csv_in;
    std::string csv_out, svg_out;
    report->add_option("--csv", csv_in, "input CSV files")->required();
    report->add_option("--out", csv_out, "merged CSV (stdout if omitted)");
    report->add_option("--svg", svg_out, "SVG plot path");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        try {
            write_text(summary_path, error_summary(e.what()));
        } catch (const Error&) {
        }
        return kExitConfigError;
    }

    try {
        if (*norm) {
            const Domain dom = norm_dom.domain();
            const auto p = ExponentFunction::from_expression(p_src, dom);
            auto f = sample(f_src, dom);
            if (unit_cube) f = restrict_to_unit_cube(f);
            const auto psi = make_psi(psi_kind, p, q_src);
            const double v = w_src.empty() ? luxemburg_norm(psi, f) : weighted_norm(psi, f, sample(w_src, dom));
            out << format_number(v) << '\n';
            Report r;
            r.add({"norm", psi_kind, v, "", dom.J(), 0, std::isfinite(v), "", 0.0});
            write_text(summary_path, r.summary_json());
            return kExitPass;
        }
        if (*weights) {
            const Domain dom = w_dom.domain();
            const Weight w = Weight::from_expression(ww_src, dom);
            const auto p = ExponentFunction::from_expression(wp_src, dom);
            Report r;
            const auto ap = ap_constant(w, p);
            r.add({"weights", "A_p", ap.value, ap.witness_id, dom.J(), 0, std::isfinite(ap.value), "", 0.0});
            if (!wq_src.empty()) {
                const auto q = ExponentFunction::from_expression(wq_src, dom);
                const auto apq = apq_constant(w, p, q);
                r.add({"weights", "A_pq", apq.value, apq.witness_id, dom.J(), 0, std::isfinite(apq.value), "", 0.0});
            }
            out << r.csv();
            write_text(summary_path, r.summary_json());
            return r.passed() ? kExitPass : kExitCheckFailed;
        }
        if (*sparse_cmd) {
            const auto build = [&] {
                const Domain dom = s_dom.domain();
                const auto f = sample(sf_src, dom);
                auto fam = cz_sparse_grid(GridFunction(dom, f.values().abs()), parse_shift(shift_ids), threshold);
                return sb_src.empty() ? fam : oscillation_augment(fam, sample(sb_src, dom));
            };
            const SparseFamily s = s_in.empty() ? build() : family_from_json(read_text(s_in));
            const auto v = verify_sparse(s);
            Report r;
            r.add({"sparse", "min |E(Q)|/|Q|", v.min_ratio, v.witness, s.domain.J(), 0, v.sparse && v.disjoint,
                   std::to_string(s.cubes.size()) + " cubes", 0.0});
            if (!s_out.empty()) write_text(s_out, family_to_json(s));
            out << r.csv();
            write_text(summary_path, r.summary_json());
            return r.passed() ? kExitPass : kExitCheckFailed;
        }
        if (*verify) {
            ExperimentConfig c = config_path.empty() ? parse_config(R"({"version":1})") : load_config(config_path);
            if (!is_registered_suite(suite_id)) throw ConfigError("unknown suite " + suite_id);
            c.suite = suite_id;
            return emit(run_suite(c), c, summary_path, out);
        }
        if (*dominate) {
            ExperimentConfig c = dom_config.empty() ? parse_config(R"({"version":1})") : load_config(dom_config);
            if (dom_kind != "czo" && dom_kind != "fractional") throw ConfigError("--kind must be czo or fractional");
            if (dom_m.empty()) dom_m = c.op.m ? std::vector<int>{*c.op.m} : std::vector<int>{0, 1, 2};
            Report r;
            for (int m : dom_m) r.append(verify_sparse_domination(dom_kind, m, c));
            return emit(r, c, summary_path, out);
        }
        if (*report) {
            Report merged;
            for (const auto& path : csv_in) merged.append(parse_report_csv(read_text(path)));
            if (csv_out.empty())
                out << merged.csv();
            else
                write_text(csv_out, merged.csv());
            if (!svg_out.empty()) write_text(svg_out, ratio_plot_svg(merged));
            write_text(summary_path, merged.summary_json());
            return kExitPass;
        }
    } catch (const Error& e) {
        const bool config_error = dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SyntaxError*>(&e) ||
                                  dynamic_cast<const PreconditionError*>(&e);
        err << (config_error ? "config error: " : "error: ") << e.what() << '\n';
        try {
            write_text(summary_path, error_summary(e.what()));
        } catch (const Error&) {
        }
        return config_error ? kExitConfigError : kExitCheckFailed;
    }
    return kExitConfigError;
}

}  // namespace varsparse
