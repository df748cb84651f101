#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "catelasso/bench.hpp"

namespace catelasso::report {

/// `replication,method,rmse,lambda,converged,wall_ms`, one line per record.
/// wall_ms is written as 0 unless `timing` is set.
std::string to_csv(const bench::RunResult& result, bool timing);

/// Mirrors RunResult: name, methods, records and per-method aggregates.
nlohmann::ordered_json to_json(const bench::RunResult& result, bool timing);

/// One box per method: quartiles, median line, whiskers at the most extreme
/// points within 1.5 IQR of the box, remaining points drawn as outliers.
std::string to_svg_boxplot(const bench::RunResult& result);

/// Writes the formats enabled in `out` as <dir>/<prefix>.{csv,json,svg}
/// and returns the paths written. Throws Error(Io).
std::vector<std::string> emit_report(const bench::RunResult& result, const bench::OutputSpec& out);

}  // namespace catelasso::report
