#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "varsparse/error.hpp"
#include "varsparse/harness/cli.hpp"
#include "varsparse/harness/config.hpp"
#include "varsparse/harness/report.hpp"
#include "varsparse/harness/suites.hpp"
#include "varsparse/sparse.hpp"

using namespace varsparse;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("varsparse_test_" + name)).string();
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    return code;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse_config(R"({"version":1,"domain":{"n":1,"L":1,"J":6},"sweep":[4,6],
        "expressions":{"p":"2+0.1*x1"},"params":{"m":2},"suite":"holder_pp","trials":7,"seed":42,
        "tolerances":{"holder":2.5},"output":{"csv":"a.csv"}})");
    CHECK(c.L == 1);
    CHECK(c.J == 6);
    CHECK(c.resolutions() == std::vector<int>{4, 6});
    CHECK(c.expression("p", "") == "2+0.1*x1");
    CHECK(c.param("m", 0) == 2.0);
    CHECK(c.param("S", 1.5) == 1.5);
    CHECK(c.trials_or(100) == 7);
    CHECK(c.seed == 42);
    CHECK(c.tolerance("holder", 2.0) == 2.5);
    CHECK(c.csv_path == "a.csv");
}

TEST_CASE("config rejection") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"domain":{"n":1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":2})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"colour":"red"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"domain":{"n":3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"expressions":{"p":"2+"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"expressions":{"p":"x2"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"expressions":{"zeta":"1"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"suite":"nope"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"trials":-1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"slack":0.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"tolerances":{"holder":0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"operator":{"kernel":"riesz"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"operator":{"kind":"fractional","alpha":1.5}})"), ConfigError);
}

TEST_CASE("commutator order precedence") {
    CHECK(parse_config(R"({"version":1})").order(1) == 1);
    CHECK(parse_config(R"({"version":1,"operator":{"m":2}})").order(1) == 2);
    CHECK(parse_config(R"({"version":1,"operator":{"m":2},"params":{"m":0}})").order(1) == 0);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"operator":{"m":-1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"version":1,"params":{"m":1.5}})"), ConfigError);
}

TEST_CASE("report CSV round trip") {
    Report r;
    r.add({"s", "a, \"quoted\" check", 0.1, "cube s0:k0:0", 8, 3, true, "", 12.5});
    r.add({"s", "b", std::numeric_limits<double>::infinity(), "", 10, 3, false, "note", 0.0});
    const auto text = r.csv();
    CHECK(text.find("12.5") == std::string::npos);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    const auto back = parse_report_csv(text);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].check == "a, \"quoted\" check");
    CHECK(back.rows[0].constant == 0.1);
    CHECK(std::isinf(back.rows[1].constant));
    CHECK(back.csv() == text);
    CHECK_FALSE(r.passed());
    CHECK(r.summary_json().find("12.5") == std::string::npos);
    CHECK_THROWS_AS(parse_report_csv("a,b\n"), ConfigError);
}

TEST_CASE("SVG plot has one polyline per multi-resolution check") {
    Report r;
    for (int J : {6, 8, 10}) r.add({"s", "c", 1.0 + J, "", J, 1, true, "", 0.0});
    r.add({"s", "single", 1.0, "", 8, 1, true, "", 0.0});
    const auto svg = ratio_plot_svg(r);
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
    CHECK(count == 1);
}

TEST_CASE("registry") {
    CHECK(is_registered_suite("lemma_326"));
    CHECK(is_registered_suite("T1.4"));
    CHECK(is_registered_suite("dominate_czo"));
    CHECK_FALSE(is_registered_suite("T1.3"));
    const auto c = parse_config(R"({"version":1})");
    CHECK_THROWS_AS(verify_lemma("nope", c), ConfigError);
    CHECK_THROWS_AS(verify_theorem("T9", c), ConfigError);
}

TEST_CASE("identity operator on matching spaces") {
    const Domain d(1, 0, 6);
    const auto p = ExponentFunction::from_expression("2 + 0.3*x1", d);
    const NormSpace s{GPhiFunction::power(p), GridFunction::constant(d, 1.0)};
    const auto e = estimate_operator_norm([](const GridFunction& f) { return f; }, s, s, 10, 5);
    for (double r : e.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));

    DyadicCube root = *cube_at(d, 1, {0, 0}, {0, 0});
    const auto one = estimate_operator_norm([](const GridFunction& f) { return f; }, s, s, 0, 5, {root});
    REQUIRE(one.ratios.size() == 1);
    CHECK(one.ratios[0] == 1.0);
}

TEST_CASE("averaging over the root contracts L^2") {
    const Domain d(1, 0, 6);
    SparseFamily fam{d, {0, 0}, {*cube_at(d, 1, {0, 0}, {0, 0})}};
    const NormSpace s{GPhiFunction::power(ExponentFunction::constant(d, 2.0)), GridFunction::constant(d, 1.0)};
    const auto e = estimate_operator_norm([&](const GridFunction& f) { return apply_AS(fam, f); }, s, s, 50, 9);
    CHECK(e.max_ratio <= 1.0 + 1e-12);
    CHECK(e.max_ratio > 0.0);
}

TEST_CASE("constant symbol gives zero commutator ratio") {
    const auto c = parse_config(R"({"version":1,"sweep":[6,7],"expressions":{"b":"3"}})");
    const auto r = verify_sparse_domination("czo", 1, c);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].constant == 0.0);
    CHECK(r.rows[1].constant == 0.0);
    CHECK(r.passed());
    CHECK_THROWS_AS(verify_sparse_domination("wavelet", 0, c), ConfigError);
}

TEST_CASE("exact Hoelder case p = 2") {
    const auto c = parse_config(R"({"version":1,"domain":{"J":6},"trials":100,"expressions":{"p":"2"}})");
    const auto r = verify_lemma("holder_pp", c);
    for (const auto& row : r.rows) CHECK(row.constant <= 1.0 + 1e-12);
    CHECK(r.passed());
}

TEST_CASE("factores chain for m = 2") {
    const auto c = parse_config(R"({"version":1,"domain":{"J":6},"params":{"m":2}})");
    const auto r = verify_lemma("factores", c);
    CHECK(r.passed());
    bool saw_h1 = false;
    for (const auto& row : r.rows)
        if (row.check.rfind("h=1", 0) == 0) saw_h1 = true;
    CHECK(saw_h1);
}

TEST_CASE("same seed, same bytes") {
    const auto c = parse_config(R"({"version":1,"domain":{"J":6},"trials":10,"seed":77,"suite":"lemma_326"})");
    CHECK(run_suite(c).csv() == run_suite(c).csv());
    CHECK(run_suite(c).summary_json() == run_suite(c).summary_json());
    auto other = c;
    other.seed = 78;
    CHECK(run_suite(other).csv() != run_suite(c).csv());
}

TEST_CASE("command line exit codes") {
    const auto summary = temp_path("summary.json");
    std::string out;
    CHECK(cli({"--summary", summary, "norm", "--psi", "power", "--p", "2", "--f", "1", "--unit-cube"}, &out) == 0);
    CHECK(out == "1\n");
    CHECK(std::filesystem::exists(summary));

    const auto bad = temp_path("bad.json");
    write_text(bad, R"({"version":1,"mystery":true})");
    std::filesystem::remove(summary);
    CHECK(cli({"--summary", summary, "verify", "lemma_326", "--config", bad}) == 2);
    CHECK(read_text(summary).find("mystery") != std::string::npos);
    CHECK(cli({"--summary", summary, "verify", "no_such_suite"}) == 2);
    CHECK(cli({"--summary", summary, "frobnicate"}) == 2);

    const auto good = temp_path("good.json");
    const auto csv = temp_path("out.csv");
    write_text(good, R"({"version":1,"domain":{"J":6},"trials":10,"output":{"csv":")" + csv + R"("}})");
    CHECK(cli({"--summary", summary, "verify", "lemma_326", "--config", good}) == 0);
    CHECK(parse_report_csv(read_text(csv)).rows.size() == 1);

    const auto failing = temp_path("failing.json");
    write_text(failing, R"({"version":1,"domain":{"J":6},"trials":10,"tolerances":{"lemma_326":1e-300}})");
    CHECK(cli({"--summary", summary, "verify", "lemma_326", "--config", failing}) == 1);

    const auto merged = temp_path("merged.csv");
    const auto svg = temp_path("plot.svg");
    CHECK(cli({"--summary", summary, "report", "--csv", csv, "--csv", csv, "--out", merged, "--svg", svg}) == 0);
    CHECK(parse_report_csv(read_text(merged)).rows.size() == 2);
    CHECK(read_text(svg).rfind("<svg", 0) == 0);
}

TEST_CASE("sparse subcommand round trip") {
    const auto summary = temp_path("summary_sparse.json");
    const auto fam = temp_path("family.json");
    std::string out;
    CHECK(cli({"--summary", summary, "sparse", "--J", "6", "--f", "abs(x1)^(-0.5)", "--b", "x1", "--out", fam}) == 0);
    std::string again;
    CHECK(cli({"--summary", summary, "sparse", "--in", fam}, &again) == 0);
    CHECK(family_to_json(family_from_json(read_text(fam))) == read_text(fam));
}
