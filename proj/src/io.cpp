#include "sobol_eff/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

namespace sobol_eff {

CsvError::CsvError(std::size_t line, const std::string& what)
    : InvalidArgument("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw CsvError(1, "missing header");
  ++lineno;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  for (auto field : split(line)) table.header.emplace_back(field);

  const std::size_t cols = table.header.size();
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != cols) {
      throw CsvError(lineno, "expected " + std::to_string(cols) + " fields, found " +
                                 std::to_string(fields.size()));
    }
    for (auto f : fields) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw CsvError(lineno, "'" + std::string(f) + "' is not a finite number");
      }
      table.values.push_back(v);
    }
    ++table.rows;
  }
  return table;
}

PickFreezeSample pickfreeze_from_csv(const CsvTable& table) {
  if (table.header != std::vector<std::string>{"y", "y_pf"}) {
    throw CsvError(1, "header must be exactly 'y,y_pf'");
  }
  if (table.rows < 2) {
    throw CsvError(table.rows + 2, "at least 2 data rows are required, found " +
                                       std::to_string(table.rows));
  }
  std::vector<double> y(table.rows), y_pf(table.rows);
  for (std::size_t i = 0; i < table.rows; ++i) {
    y[i] = table.values[2 * i];
    y_pf[i] = table.values[2 * i + 1];
  }
  return PickFreezeSample(std::move(y), std::move(y_pf));
}

std::size_t givendata_dimension(const CsvTable& table) {
  const auto& h = table.header;
  if (h.size() < 2 || h.back() != "y") {
    throw CsvError(1, "header must be 'x1,...,xd,y' with d >= 1");
  }
  for (std::size_t j = 0; j + 1 < h.size(); ++j) {
    if (h[j] != "x" + std::to_string(j + 1)) {
      throw CsvError(1, "header column " + std::to_string(j + 1) + " must be 'x" +
                            std::to_string(j + 1) + "', found '" + h[j] + "'");
    }
  }
  return h.size() - 1;
}

GivenDataSample givendata_from_csv(const CsvTable& table) {
  const std::size_t d = givendata_dimension(table);
  const std::size_t cols = d + 1;
  std::vector<double> x;
  std::vector<double> y(table.rows);
  x.reserve(table.rows * d);
  for (std::size_t i = 0; i < table.rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) x.push_back(table.values[i * cols + j]);
    y[i] = table.values[i * cols + d];
  }
  return GivenDataSample(std::move(x), d, std::move(y));
}

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_csv(std::ostream& out, const PickFreezeSample& s) {
  out << "y,y_pf\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_double(s.y()[i]) << ',' << format_double(s.y_pf()[i]) << '\n';
  }
}

void write_csv(std::ostream& out, const GivenDataSample& s) {
  for (std::size_t j = 0; j < s.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (double v : s.row(i)) out << format_double(v) << ',';
    out << format_double(s.y()[i]) << '\n';
  }
}

nlohmann::json to_json(const SobolEstimate& est) {
  return {{"schema_version", kReportSchemaVersion},
          {"method", std::string(to_string(est.method))},
          {"n", est.n},
          {"point", est.point},
          {"asym_variance", est.asym_variance},
          {"ci", {est.ci_low, est.ci_high}},
          {"level", est.level}};
}

nlohmann::json to_json(const GdEstimateDetail& detail, std::size_t d) {
  auto j = to_json(detail.estimate);
  j["d"] = d;
  j["k_used"] = detail.k_used;
  j["folds"] = detail.folds;
  return j;
}

nlohmann::json to_json(const ReplicationReport& rep) {
  return {{"schema_version", kReportSchemaVersion},
          {"mode", "efficiency"},
          {"model", rep.model},
          {"setting", std::string(to_string(rep.setting))},
          {"estimator", rep.estimator},
          {"n", rep.n},
          {"R", rep.replications},
          {"failed", rep.failed},
          {"s_true", rep.s_true},
          {"mean", rep.mean},
          {"bias", rep.bias},
          {"replication_se", rep.replication_se},
          {"var_scaled", rep.var_scaled},
          {"mean_asym_variance", rep.mean_asym_variance},
          {"bound", rep.bound},
          {"bound_mc_se", rep.bound_mc_se},
          {"efficiency_ratio", rep.efficiency_ratio},
          {"estimates", rep.estimates}};
}

nlohmann::json to_json(const ExpansionReport& rep) {
  return {{"schema_version", kReportSchemaVersion},
          {"mode", "expansion"},
          {"model", rep.model},
          {"setting", std::string(to_string(rep.setting))},
          {"estimator", rep.estimator},
          {"n_values", rep.n_values},
          {"rms_scaled_residual", rep.rms_scaled_residual},
          {"replications", rep.replications},
          {"failed", rep.failed}};
}

}  // namespace sobol_eff
