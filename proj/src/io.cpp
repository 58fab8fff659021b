#include "tsc/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tsc {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += ch;
        }
    }
    fields.push_back(field);
    return fields;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line_no,
                             const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

int parse_index(const std::string& s, const std::filesystem::path& path, int line_no) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size() || v < 0) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        parse_fail(path, line_no, "expected a nonnegative integer, got '" + s + "'");
    }
}

double parse_real(const std::string& s, const std::filesystem::path& path, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        parse_fail(path, line_no, "expected a finite real, got '" + s + "'");
    }
}

bool is_missing_token(const std::string& s) {
    if (s.empty()) return true;
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower == "nan";
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // LF newlines everywhere
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ObservationSet load_observations(const std::filesystem::path& path, std::optional<int> rows,
                                 std::optional<int> cols) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "j,t,y") {
        throw std::runtime_error(path.string() + ":1: expected header 'j,t,y'");
    }
    ObservationSet obs;
    int max_j = -1, max_t = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != 3) parse_fail(path, line_no, "expected 3 fields");
        const int j = parse_index(f[0], path, line_no);
        const int t = parse_index(f[1], path, line_no);
        const double y = parse_real(f[2], path, line_no);
        obs.entries.push_back({j, t, y});
        max_j = std::max(max_j, j);
        max_t = std::max(max_t, t);
    }
    if (obs.entries.empty()) {
        throw std::runtime_error(path.string() + ": empty observation set");
    }
    obs.d = rows.value_or(max_j + 1);
    obs.T = cols.value_or(max_t + 1);
    if (max_j >= obs.d || max_t >= obs.T) {
        throw std::runtime_error(path.string() + ": entries exceed the requested dimensions");
    }
    return obs;
}

void save_observations(const ObservationSet& obs, const std::filesystem::path& path) {
    validate(obs);
    std::ofstream out = open_out(path);
    out << "j,t,y\n";
    for (const Observation& e : obs.entries) {
        out << e.j << ',' << e.t << ',' << format_double(e.y) << '\n';
    }
}

MatrixWithMissing load_matrix_with_missing(const std::filesystem::path& path, bool has_header,
                                           const std::vector<int>& drop_cols) {
    std::ifstream in = open_in(path);
    std::string line;
    int line_no = 0;
    if (has_header) {
        std::getline(in, line);
        ++line_no;
    }
    std::vector<std::vector<std::string>> raw;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv(line);
        if (width == 0) width = f.size();
        if (f.size() != width) parse_fail(path, line_no, "ragged row");
        raw.push_back(std::move(f));
    }
    if (raw.empty() || width == 0) {
        throw std::runtime_error(path.string() + ": empty matrix");
    }

    std::set<int> dropped(drop_cols.begin(), drop_cols.end());
    for (int c : dropped) {
        if (c < 0 || static_cast<std::size_t>(c) >= width) {
            throw std::runtime_error("drop column " + std::to_string(c) + " out of range");
        }
    }
    std::vector<int> keep;
    for (std::size_t c = 0; c < width; ++c) {
        if (!dropped.count(static_cast<int>(c))) keep.push_back(static_cast<int>(c));
    }
    if (keep.empty()) {
        throw std::runtime_error("all columns dropped");
    }

    MatrixWithMissing out;
    const int d = static_cast<int>(raw.size());
    const int T = static_cast<int>(keep.size());
    out.values = Matrix::Constant(d, T, std::numeric_limits<double>::quiet_NaN());
    out.observed.d = d;
    out.observed.T = T;
    const int header_lines = has_header ? 1 : 0;
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < T; ++c) {
            const std::string& cell = raw[static_cast<std::size_t>(r)][static_cast<std::size_t>(keep[c])];
            if (is_missing_token(cell)) continue;
            const double v = parse_real(cell, path, r + 1 + header_lines);
            out.values(r, c) = v;
            out.observed.entries.push_back({r, c, v});
        }
    }
    return out;
}

void save_matrix(const Matrix& A, const std::filesystem::path& path, bool header) {
    std::ofstream out = open_out(path);
    if (header) {
        for (int c = 0; c < A.cols(); ++c) out << (c ? "," : "") << 'c' << c;
        out << '\n';
    }
    for (int r = 0; r < A.rows(); ++r) {
        for (int c = 0; c < A.cols(); ++c) {
            if (c) out << ',';
            out << format_double(A(r, c));
        }
        out << '\n';
    }
}

Matrix load_matrix(const std::filesystem::path& path, bool has_header) {
    const MatrixWithMissing m = load_matrix_with_missing(path, has_header);
    return m.values;
}

void save_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "experiment,model,x,mean_mse,std_mse,replications\n";
    for (const ExperimentReport::Cell& cell : report.cells) {
        out << report.name << ',' << cell.model << ',' << format_double(cell.x) << ','
            << format_double(cell.mean_mse) << ',' << format_double(cell.std_mse) << ','
            << cell.replications << '\n';
    }
}

void save_rank_frequency_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "selected_k,frequency\n";
    for (const auto& [k, freq] : report.rank_frequency) {
        out << k << ',' << format_double(freq) << '\n';
    }
}

void save_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["experiment"] = report.name;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.config) cfg[key] = value;
    j["config"] = cfg;
    nlohmann::ordered_json scalars = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.scalars) scalars[key] = value;
    j["scalars"] = scalars;
    if (!report.rank_frequency.empty()) {
        nlohmann::ordered_json freq = nlohmann::ordered_json::object();
        for (const auto& [k, f] : report.rank_frequency) freq[std::to_string(k)] = f;
        j["rank_frequency"] = freq;
    }
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const ExperimentReport::Cell& cell : report.cells) {
        cells.push_back({{"model", cell.model},
                         {"x", cell.x},
                         {"mean_mse", cell.mean_mse},
                         {"std_mse", cell.std_mse},
                         {"replications", cell.replications}});
    }
    j["cells"] = cells;
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace tsc
