#include "sparseode/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sparseode {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, int line_no) {
    const std::string t = trim(field);
    if (t.empty())
        throw ParseError("line " + std::to_string(line_no) + ": empty field");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + t +
                         "'");
    return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RescaledSeries ingest_timeseries(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw ParseError("line 1: empty file");
    const std::vector<std::string> header = split_fields(lines[0]);
    if (header.size() < 2)
        throw ParseError("line 1: need a time column and at least one series");

    TimeSeries raw;
    const int p = static_cast<int>(header.size()) - 1;
    raw.names.reserve(p);
    for (int j = 1; j <= p; ++j) {
        const std::string name = trim(header[j]);
        if (name.empty())
            throw ParseError("line 1: empty column name in position " +
                             std::to_string(j + 1));
        raw.names.push_back(name);
    }

    std::vector<double> times;
    std::vector<double> flat;
    for (size_t k = 1; k < lines.size(); ++k) {
        if (trim(lines[k]).empty()) continue;
        const int line_no = static_cast<int>(k) + 1;
        const std::vector<std::string> fields = split_fields(lines[k]);
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        times.push_back(parse_number(fields[0], line_no));
        for (int j = 1; j <= p; ++j) flat.push_back(parse_number(fields[j], line_no));
    }

    const int n = static_cast<int>(times.size());
    raw.times = Eigen::Map<Eigen::VectorXd>(times.data(), n);
    raw.values.resize(n, p);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < p; ++j) raw.values(r, j) = flat[r * p + j];
    return rescale_times(raw);
}

void write_series_csv(const std::filesystem::path& path,
                      const Eigen::VectorXd& times, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& names) {
    if (times.size() != values.rows())
        throw ShapeMismatch("one time per row expected");
    const int p = static_cast<int>(values.cols());
    if (!names.empty() && static_cast<int>(names.size()) != p)
        throw ShapeMismatch("one name per column expected");
    std::ofstream out = open_out(path);
    out << "time";
    for (int j = 0; j < p; ++j)
        out << ',' << (names.empty() ? "m" + std::to_string(j + 1) : names[j]);
    out << '\n';
    for (Eigen::Index r = 0; r < times.size(); ++r) {
        out << format_full(times[r]);
        for (int j = 0; j < p; ++j) out << ',' << format_full(values(r, j));
        out << '\n';
    }
}

void write_adjacency_csv(const std::filesystem::path& path, const Eigen::MatrixXd& A,
                         double tol) {
    std::ofstream out = open_out(path);
    out << "row,col,coefficient\n";
    for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            if (std::abs(A(r, c)) > tol)
                out << (r + 1) << ',' << (c + 1) << ',' << format_full(A(r, c))
                    << '\n';
}

Eigen::MatrixXd read_adjacency_csv(const std::filesystem::path& path, int p) {
    if (p < 1) throw ValidationError("matrix size must be positive");
    const std::vector<std::string> lines = read_lines(path);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
    for (size_t k = 0; k < lines.size(); ++k) {
        const std::string line = trim(lines[k]);
        if (line.empty()) continue;
        if (k == 0 && line == "row,col,coefficient") continue;
        const int line_no = static_cast<int>(k) + 1;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 3)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected row,col,coefficient");
        const double r = parse_number(fields[0], line_no);
        const double c = parse_number(fields[1], line_no);
        const int ri = static_cast<int>(r), ci = static_cast<int>(c);
        if (ri < 1 || ri > p || ci < 1 || ci > p || ri != r || ci != c)
            throw ParseError("line " + std::to_string(line_no) +
                             ": index out of range");
        A(ri - 1, ci - 1) = parse_number(fields[2], line_no);
    }
    return A;
}

void write_benchmark_report_csv(const std::filesystem::path& path,
                                const BenchmarkReport& report) {
    std::ofstream out = open_out(path);
    out << "estimator,n,replicates,amse_mean,amse_stderr,avg_nonzero\n";
    for (size_t e = 0; e < kEstimatorNames.size(); ++e) {
        const EstimatorAggregate agg =
            report.aggregate(static_cast<EstimatorKind>(e));
        out << kEstimatorNames[e] << ',' << report.sim.n << ',' << agg.count
            << ',' << format_full(agg.amse_mean) << ','
            << format_full(agg.amse_se) << ',' << format_full(agg.avg_nonzero)
            << '\n';
    }
}

std::vector<std::pair<std::string, std::string>> read_edge_list(
    const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    std::vector<std::pair<std::string, std::string>> edges;
    for (size_t k = 0; k < lines.size(); ++k) {
        const std::string line = trim(lines[k]);
        if (line.empty()) continue;
        if (k == 0 && line == "source,target") continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 2)
            throw ParseError("line " + std::to_string(k + 1) +
                             ": expected source,target");
        const std::string src = trim(fields[0]);
        const std::string tgt = trim(fields[1]);
        if (src.empty() || tgt.empty())
            throw ParseError("line " + std::to_string(k + 1) + ": empty gene name");
        edges.emplace_back(src, tgt);
    }
    return edges;
}

}  // namespace sparseode
