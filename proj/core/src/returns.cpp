#include "mctail/returns.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "mctail/error.hpp"
#include "mctail/stats.hpp"

namespace mctail {

namespace {

constexpr std::size_t kMinObservations = 100;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::size_t resolve_column(const std::vector<std::string>& header,
                           const std::string& selector) {
  if (selector.empty()) return header.size() - 1;

  // Numeric selectors are 0-based indices.
  if (!selector.empty() &&
      std::all_of(selector.begin(), selector.end(),
                  [](unsigned char c) { return std::isdigit(c); })) {
    const std::size_t index = std::strtoull(selector.c_str(), nullptr, 10);
    if (index >= header.size()) {
      throw Error(ErrorCode::MissingColumn,
                  "column index " + selector + " out of range; the header has " +
                      std::to_string(header.size()) + " columns");
    }
    return index;
  }

  const std::string wanted = lower(selector);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(header[i]) == wanted) return i;
  }
  throw Error(ErrorCode::MissingColumn,
              "no column named '" + selector + "' in the header");
}

}  // namespace

InputFormat input_format_from_string(const std::string& text) {
  if (text == "prices") return InputFormat::Prices;
  if (text == "returns") return InputFormat::Returns;
  throw Error(ErrorCode::DomainError,
              "unknown input format '" + text + "' (expected prices or returns)");
}

ReturnsSeries ingest(const std::filesystem::path& path, InputFormat format,
                     const std::string& column) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }

  std::string header_line;
  if (!std::getline(file, header_line)) {
    throw Error(ErrorCode::UnparsableRow, "empty file: " + path.string());
  }
  header_line = strip_cr(header_line);
  const char delim = header_line.find('\t') != std::string::npos ? '\t' : ',';
  const auto header = split(header_line, delim);
  const std::size_t col = resolve_column(header, column);

  ReturnsSeries series;
  series.source_path = path.string();
  series.label = header[col];
  series.transform =
      (format == InputFormat::Prices) ? "log-returns" : "as-is";

  // Values with their original row index, so the prices transform can
  // refuse to bridge a dropped row.
  std::vector<std::pair<std::size_t, double>> parsed;
  std::string line;
  std::size_t line_number = 1;  // header was line 1
  while (std::getline(file, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, delim);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::UnparsableRow,
                  "line " + std::to_string(line_number) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    const std::string& cell = fields[col];
    char* end = nullptr;
    const double value = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
      throw Error(ErrorCode::UnparsableRow,
                  "line " + std::to_string(line_number) + ": cannot parse '" +
                      cell + "' as a number");
    }
    parsed.emplace_back(line_number, value);
  }

  if (format == InputFormat::Returns) {
    for (const auto& [row, value] : parsed) {
      if (!std::isfinite(value)) {
        ++series.rows_dropped;
        continue;
      }
      series.observations.push_back(value);
    }
  } else {
    bool have_prev = false;
    std::size_t prev_row = 0;
    double prev_price = 0.0;
    for (const auto& [row, value] : parsed) {
      if (!std::isfinite(value) || value <= 0.0) {
        ++series.rows_dropped;
        continue;
      }
      if (have_prev && row == prev_row + 1) {
        series.observations.push_back(std::log(value / prev_price));
      }
      have_prev = true;
      prev_row = row;
      prev_price = value;
    }
  }

  if (series.observations.size() < kMinObservations) {
    throw Error(ErrorCode::TooShort,
                "only " + std::to_string(series.observations.size()) +
                    " observations after the transform (need at least " +
                    std::to_string(kMinObservations) + ")");
  }
  return series;
}

std::vector<ReturnsSeries> split_periods(const ReturnsSeries& series,
                                         std::size_t parts) {
  if (parts < 1) {
    throw Error(ErrorCode::DomainError, "parts must be at least 1");
  }
  const std::size_t n = series.observations.size();
  if (n % parts != 0) {
    throw Error(ErrorCode::NotDivisible,
                std::to_string(n) + " observations are not divisible into " +
                    std::to_string(parts) + " equal periods (remainder " +
                    std::to_string(n % parts) + ")");
  }
  const std::size_t block = n / parts;
  std::vector<ReturnsSeries> periods;
  periods.reserve(parts);
  for (std::size_t p = 0; p < parts; ++p) {
    ReturnsSeries part = series;
    part.observations.assign(series.observations.begin() + p * block,
                             series.observations.begin() + (p + 1) * block);
    part.label = series.label + " period " + std::to_string(p + 1);
    periods.push_back(std::move(part));
  }
  return periods;
}

Histogram histogram(std::span<const double> data, std::size_t bins) {
  if (bins < 1) {
    throw Error(ErrorCode::DomainError, "need at least 1 bin");
  }
  if (data.size() < 2) {
    throw Error(ErrorCode::TooShort, "histogram needs at least 2 observations");
  }
  const double mean = sample_mean(data);
  const double sd = std::sqrt(sample_variance(data));
  if (!(sd > 0.0)) {
    throw Error(ErrorCode::DomainError, "histogram of constant data");
  }

  std::vector<double> standardized;
  standardized.reserve(data.size());
  for (double v : data) standardized.push_back((v - mean) / sd);

  const auto [lo_it, hi_it] =
      std::minmax_element(standardized.begin(), standardized.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double width = (hi > lo) ? (hi - lo) / static_cast<double>(bins) : 1.0;

  Histogram result;
  result.total = data.size();
  result.mean = mean;
  result.stddev = sd;
  result.bins.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    result.bins[b].left = lo + width * static_cast<double>(b);
    result.bins[b].right = lo + width * static_cast<double>(b + 1);
    result.bins[b].count = 0;
  }
  for (double v : standardized) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    if (b >= bins) b = bins - 1;  // the maximum lands in the last bin
    ++result.bins[b].count;
  }
  for (auto& bin : result.bins) {
    bin.density = static_cast<double>(bin.count) /
                  (static_cast<double>(result.total) * width);
    bin.normal_density = normal_pdf(0.5 * (bin.left + bin.right));
  }
  return result;
}

}  // namespace mctail
