#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace varsparse {

struct ReportRow {
    std::string suite;
    std::string check;
    double constant = 0.0;
    std::string witness;
    int J = 0;
    std::uint64_t seed = 0;
    bool pass = true;
    std::string note;
    double wall_time = 0.0;  // seconds; kept out of every artifact so reruns are byte-identical
};

struct Report {
    std::vector<ReportRow> rows;

    bool passed() const;
    void add(ReportRow row) { rows.push_back(std::move(row)); }
    void append(const Report& other);

    /// "suite,check,constant,witness,J,seed" with %.17g numbers.
    std::string csv() const;
    /// {"passed":..., "rows":[...]} with the same numbers plus pass flags and notes.
    std::string summary_json() const;
};

Report parse_report_csv(const std::string& text);
std::string format_number(double x);

/// One polyline per (suite, check) of constant against J, log-scaled.
std::string ratio_plot_svg(const Report& r);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace varsparse
