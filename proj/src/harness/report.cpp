#include "varsparse/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "varsparse/error.hpp"

namespace varsparse {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool Report::passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

void Report::append(const Report& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }

std::string Report::csv() const {
    std::ostringstream s;
    s << "suite,check,constant,witness,J,seed\n";
    for (const auto& r : rows)
        s << csv_field(r.suite) << ',' << csv_field(r.check) << ',' << format_number(r.constant) << ','
          << csv_field(r.witness) << ',' << r.J << ',' << r.seed << '\n';
    return s.str();
}

std::string Report::summary_json() const {
    nlohmann::ordered_json j;
    j["passed"] = passed();
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json o;
        o["suite"] = r.suite;
        o["check"] = r.check;
        o["constant"] = format_number(r.constant);
        o["witness"] = r.witness;
        o["J"] = r.J;
        o["seed"] = r.seed;
        o["pass"] = r.pass;
        if (!r.note.empty()) o["note"] = r.note;
        j["rows"].push_back(o);
    }
    return j.dump(2) + "\n";
}

Report parse_report_csv(const std::string& text) {
    Report r;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "suite,check,constant,witness,J,seed")
        throw ConfigError("not a report CSV (bad header)");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw ConfigError("malformed report row: " + line);
        ReportRow row;
        row.suite = f[0];
        row.check = f[1];
        try {
            row.constant = std::stod(f[2]);
            row.J = std::stoi(f[4]);
            row.seed = std::stoull(f[5]);
        } catch (const std::exception&) {
            throw ConfigError("malformed report row: " + line);
        }
        row.witness = f[3];
        r.rows.push_back(row);
    }
    return r;
}

std::string ratio_plot_svg(const Report& r) {
    std::map<std::string, std::vector<std::pair<int, double>>> series;
    for (const auto& row : r.rows)
        if (row.J > 0 && std::isfinite(row.constant) && row.constant > 0.0)
            series[row.suite + "/" + row.check].push_back({row.J, row.constant});
    for (auto it = series.begin(); it != series.end();)
        it = it->second.size() < 2 ? series.erase(it) : std::next(it);

    int jmin = 1 << 30, jmax = -(1 << 30);
    double ymin = 1e300, ymax = -1e300;
    for (auto& [name, pts] : series) {
        std::sort(pts.begin(), pts.end());
        for (const auto& [J, y] : pts) {
            jmin = std::min(jmin, J);
            jmax = std::max(jmax, J);
            ymin = std::min(ymin, std::log10(y));
            ymax = std::max(ymax, std::log10(y));
        }
    }
    const int W = 640, H = 400, pad = 50;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H + 20 * series.size()
      << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
    if (series.empty()) {
        s << "<text x=\"" << pad << "\" y=\"" << H / 2 << "\">no multi-resolution rows</text>\n</svg>\n";
        return s.str();
    }
    if (jmax == jmin) ++jmax;
    if (ymax - ymin < 1e-9) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const auto X = [&](int J) { return pad + (W - 2.0 * pad) * (J - jmin) / (jmax - jmin); };
    const auto Y = [&](double y) { return H - pad - (H - 2.0 * pad) * (std::log10(y) - ymin) / (ymax - ymin); };
    char buf[64];
    s << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\">J</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", std::pow(10.0, ymin));
    s << "<text x=\"4\" y=\"" << H - pad << "\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", std::pow(10.0, ymax));
    s << "<text x=\"4\" y=\"" << pad << "\">" << buf << "</text>\n";
    for (int J = jmin; J <= jmax; ++J)
        s << "<text x=\"" << X(J) - 4 << "\" y=\"" << H - pad + 16 << "\">" << J << "</text>\n";
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::size_t k = 0;
    for (const auto& [name, pts] : series) {
        const char* col = colours[k % 6];
        s << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
        for (const auto& [J, y] : pts) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(J), Y(y));
            s << buf;
        }
        s << "\"/>\n";
        s << "<text x=\"" << pad << "\" y=\"" << H + 20 * k + 10 << "\" fill=\"" << col << "\">"
          << xml_escape(name) << "</text>\n";
        ++k;
    }
    s << "</svg>\n";
    return s.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace varsparse
