#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sobol_eff/givendata.hpp"
#include "sobol_eff/harness.hpp"
#include "sobol_eff/pickfreeze.hpp"

namespace sobol_eff {

/// Version stamped into every JSON report.
inline constexpr int kReportSchemaVersion = 1;

/// Malformed CSV input. `line()` is the 1-based line of the first problem.
class CsvError : public InvalidArgument {
 public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Comma-separated, '.' decimal point, no quoting, mandatory header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<double> values;  // row-major
  std::size_t rows = 0;
};

CsvTable read_csv(std::istream& in);

/// Header must be exactly `y,y_pf`, with at least 2 data rows.
PickFreezeSample pickfreeze_from_csv(const CsvTable& table);

/// Header must be `x1,...,xd,y` with d >= 1. Row-count limits are left to
/// the caller; the sample itself needs 2 rows.
GivenDataSample givendata_from_csv(const CsvTable& table);

/// Header `x1,...,xd,y` check only; returns d.
std::size_t givendata_dimension(const CsvTable& table);

/// Writers use 17 significant digits so values parse back exactly.
void write_csv(std::ostream& out, const PickFreezeSample& s);
void write_csv(std::ostream& out, const GivenDataSample& s);

std::string format_double(double v);

nlohmann::json to_json(const SobolEstimate& est);
nlohmann::json to_json(const GdEstimateDetail& detail, std::size_t d);
nlohmann::json to_json(const ReplicationReport& rep);
nlohmann::json to_json(const ExpansionReport& rep);

}  // namespace sobol_eff
