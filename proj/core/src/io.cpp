#include "bgev/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "bgev/errors.hpp"
#include "bgev/stats.hpp"

namespace bgev {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(const std::string& name, const std::string& source) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw DataError(source + ": missing column '" + name + "'");
}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    detail::require_data(line.find('"') == std::string::npos, where(source, number) + "quoted fields are not supported");
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    detail::require_data(fields.size() == table.header.size(),
                         where(source, number) + "expected " + std::to_string(table.header.size()) + " fields, found " +
                             std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
    table.lines.push_back(number);
  }
  detail::require_data(have_header, source + ": empty file (no header)");
  return table;
}

double parse_real(const std::string& field, const std::string& source, std::size_t line, const std::string& column) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  detail::require_data(res.ec == std::errc() && res.ptr == end && std::isfinite(value),
                       where(source, line) + "column '" + column + "': not a finite number: '" + field + "'");
  return value;
}

std::int64_t parse_integer(const std::string& field, const std::string& source, std::size_t line,
                           const std::string& column) {
  std::int64_t value = 0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  detail::require_data(res.ec == std::errc() && res.ptr == end,
                       where(source, line) + "column '" + column + "': not an integer: '" + field + "'");
  return value;
}

BlockMaximaTable read_block_maxima(std::istream& in, const std::string& source, const CovariateSpec& covariates) {
  const CsvTable csv = read_csv(in, source);
  const std::size_t c_station = csv.column("station_id", source);
  const std::size_t c_year = csv.column("year", source);
  const std::size_t c_max = csv.column("maximum", source);
  std::vector<std::size_t> c_mu;
  std::vector<std::size_t> c_sigma;
  for (const auto& name : covariates.mu) c_mu.push_back(csv.column(name, source));
  for (const auto& name : covariates.sigma) c_sigma.push_back(csv.column(name, source));

  const auto n = static_cast<Eigen::Index>(csv.rows.size());
  detail::require_data(n > 0, source + ": no data rows");
  BlockMaximaTable t;
  t.y.resize(n);
  t.x_mu = Eigen::MatrixXd::Ones(n, static_cast<Eigen::Index>(c_mu.size()) + 1);
  t.x_sigma = Eigen::MatrixXd::Ones(n, static_cast<Eigen::Index>(c_sigma.size()) + 1);
  t.mu_names.push_back("intercept");
  t.mu_names.insert(t.mu_names.end(), covariates.mu.begin(), covariates.mu.end());
  t.sigma_names.push_back("intercept");
  t.sigma_names.insert(t.sigma_names.end(), covariates.sigma.begin(), covariates.sigma.end());

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = csv.rows[static_cast<std::size_t>(i)];
    const std::size_t line = csv.lines[static_cast<std::size_t>(i)];
    detail::require_data(!row[c_station].empty(), where(source, line) + "empty station_id");
    t.station_ids.push_back(row[c_station]);
    t.years.push_back(static_cast<int>(parse_integer(row[c_year], source, line, "year")));
    t.y[i] = parse_real(row[c_max], source, line, "maximum");
    detail::require_data(t.y[i] >= 0.0, where(source, line) + "negative maximum");
    for (std::size_t j = 0; j < c_mu.size(); ++j) {
      t.x_mu(i, static_cast<Eigen::Index>(j) + 1) = parse_real(row[c_mu[j]], source, line, covariates.mu[j]);
    }
    for (std::size_t j = 0; j < c_sigma.size(); ++j) {
      t.x_sigma(i, static_cast<Eigen::Index>(j) + 1) = parse_real(row[c_sigma[j]], source, line, covariates.sigma[j]);
    }
  }

  if (covariates.standardise) {
    auto standardise = [&](Eigen::MatrixXd& x, const std::vector<std::string>& names) {
      for (Eigen::Index j = 1; j < x.cols(); ++j) {
        std::vector<double> col(x.col(j).data(), x.col(j).data() + n);
        const double sd = n > 1 ? sample_sd(col) : 0.0;
        detail::require_data(sd > 0.0, source + ": covariate '" + names[static_cast<std::size_t>(j)] + "' is constant");
        x.col(j) = (x.col(j).array() - mean(col)) / sd;
      }
    };
    standardise(t.x_mu, t.mu_names);
    standardise(t.x_sigma, t.sigma_names);
  }

  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < t.station_ids.size(); ++i) {
    const std::string key = t.station_ids[i] + '\x1f' + std::to_string(t.years[i]);
    const auto [it, inserted] = seen.emplace(key, csv.lines[i]);
    detail::require_data(inserted, where(source, csv.lines[i]) + "duplicate (station, year) also on line " +
                                       std::to_string(it->second));
  }
  t.validate();
  return t;
}

std::vector<ExceedanceSeries> read_exceedances(std::istream& in, const std::string& source,
                                               std::int64_t steps_per_year) {
  const CsvTable csv = read_csv(in, source);
  const std::size_t c_station = csv.column("station_id", source);
  const std::size_t c_t = csv.column("t", source);
  const std::size_t c_value = csv.column("value", source);

  std::vector<ExceedanceSeries> out;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    const std::size_t line = csv.lines[i];
    detail::require_data(!row[c_station].empty(), where(source, line) + "empty station_id");
    const auto [it, inserted] = index.emplace(row[c_station], out.size());
    if (inserted) out.push_back(ExceedanceSeries{row[c_station], {}, {}, 0});
    ExceedanceSeries& s = out[it->second];
    const std::int64_t t = parse_integer(row[c_t], source, line, "t");
    const double v = parse_real(row[c_value], source, line, "value");
    detail::require_data(v >= 0.0, where(source, line) + "negative value");
    detail::require_data(s.t.empty() || t > s.t.back(),
                         where(source, line) + "time index not increasing for station " + s.station_id);
    s.t.push_back(t);
    s.value.push_back(v);
  }
  for (auto& s : out) s.years_of_data = count_years(s.t, steps_per_year);
  return out;
}

}  // namespace bgev
