#pragma once

// CSV schemas shared by the library and the command-line tool.
//
//   block maxima:  station_id,year,maximum,<covariates...>
//   exceedances:   station_id,t,value
//
// Parse errors are DataError with "source:line:" prefixes.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bgev/inference.hpp"
#include "bgev/twostep.hpp"

namespace bgev {

/// Shortest decimal representation that round-trips to the same double.
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row.
  std::vector<std::size_t> lines;

  /// Index of a header column; throws DataError when absent.
  std::size_t column(const std::string& name, const std::string& source) const;
};

/// Comma-separated, no quoting; fields are trimmed, blank lines skipped. Every
/// row must have as many fields as the header.
CsvTable read_csv(std::istream& in, const std::string& source);

double parse_real(const std::string& field, const std::string& source, std::size_t line, const std::string& column);
std::int64_t parse_integer(const std::string& field, const std::string& source, std::size_t line,
                           const std::string& column);

struct CovariateSpec {
  std::vector<std::string> mu;
  std::vector<std::string> sigma;
  /// Rescale each named covariate column to zero mean and unit SD.
  bool standardise = true;
};

/// Both designs get a leading "intercept" column of ones followed by the named covariates.
BlockMaximaTable read_block_maxima(std::istream& in, const std::string& source, const CovariateSpec& covariates = {});

/// Groups rows by station in order of first appearance. years_of_data counts
/// distinct floor(t / steps_per_year).
std::vector<ExceedanceSeries> read_exceedances(std::istream& in, const std::string& source,
                                               std::int64_t steps_per_year = 8760);

}  // namespace bgev
