#include "catelasso/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace catelasso::io {
namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '"' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '"' || s[e - 1] == '\r'))
        --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* first = s.data();
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

Vector to_vector(const nlohmann::json& arr, const char* name) {
    if (!arr.is_array()) {
        throw Error(ErrorKind::InvalidInput, std::string("truth sidecar: '") + name +
                                                 "' must be an array");
    }
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

nlohmann::json to_json_array(const Vector& v) {
    auto arr = nlohmann::json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), ptr);
}

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    return std::nullopt;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");

    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);

        std::vector<double> row;
        row.reserve(fields.size());
        bool numeric = true;
        for (const auto& f : fields) {
            auto v = parse_number(f);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }

        if (!numeric) {
            if (table.header.empty() && table.rows.empty()) {
                table.header = std::move(fields);
                width = table.header.size();
                continue;
            }
            throw Error(ErrorKind::CsvParse, path + ":" + std::to_string(line_no) +
                                                 ": non-numeric field");
        }
        if (width == 0) width = row.size();
        if (row.size() != width) {
            throw Error(ErrorKind::CsvParse, path + ":" + std::to_string(line_no) + ": expected " +
                                                 std::to_string(width) + " fields, got " +
                                                 std::to_string(row.size()));
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw Error(ErrorKind::CsvParse, path + ": no data rows");
    return table;
}

void write_dataset_csv(const std::string& path, const ObservationSet& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << "y,d";
    for (Eigen::Index j = 1; j <= data.p(); ++j) out << ",x" << j;
    out << '\n';
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        out << format_double(data.outcomes()(i)) << ','
            << data.treatments()[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < data.p(); ++j) {
            out << ',' << format_double(data.covariates()(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

ObservationSet read_dataset_csv(const std::string& path, std::optional<GroundTruth> truth) {
    const CsvTable table = read_csv(path);
    if (table.header.empty()) throw Error(ErrorKind::CsvParse, path + ": missing header row");
    const auto y_col = table.column("y");
    const auto d_col = table.column("d");
    if (!y_col) throw Error(ErrorKind::CsvParse, path + ": missing column 'y'");
    if (!d_col) throw Error(ErrorKind::MissingTreatmentColumn, path + ": missing column 'd'");

    std::vector<std::size_t> x_cols;
    for (std::size_t j = 1;; ++j) {
        auto c = table.column("x" + std::to_string(j));
        if (!c) break;
        x_cols.push_back(*c);
    }
    if (x_cols.empty()) throw Error(ErrorKind::CsvParse, path + ": no covariate columns x1..xp");

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const auto p = static_cast<Eigen::Index>(x_cols.size());
    Matrix x(n, p);
    Vector y(n);
    std::vector<int> d(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        y(i) = row[*y_col];
        const double dv = row[*d_col];
        if (dv != 0.0 && dv != 1.0) {
            throw Error(ErrorKind::InvalidInput, path + ": treatment must be 0 or 1");
        }
        d[static_cast<std::size_t>(i)] = static_cast<int>(dv);
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = row[x_cols[static_cast<std::size_t>(j)]];
    }
    return ObservationSet(std::move(x), std::move(d), std::move(y), std::move(truth));
}

void write_truth_json(const std::string& path, const GroundTruth& truth) {
    nlohmann::json j;
    j["beta1"] = to_json_array(truth.beta1);
    j["beta0"] = to_json_array(truth.beta0);
    j["s0"] = truth.s0;
    if (truth.propensities) j["propensities"] = to_json_array(*truth.propensities);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

GroundTruth read_truth_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
    }
    GroundTruth t;
    try {
        t.beta1 = to_vector(j.at("beta1"), "beta1");
        t.beta0 = to_vector(j.at("beta0"), "beta0");
        t.s0 = j.at("s0").get<std::size_t>();
        if (j.contains("propensities") && !j["propensities"].is_null()) {
            t.propensities = to_vector(j["propensities"], "propensities");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
    }
    return t;
}

}  // namespace catelasso::io
