#ifndef MCTAIL_RETURNS_HPP
#define MCTAIL_RETURNS_HPP

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mctail/error.hpp"

namespace mctail {

enum class InputFormat { Prices, Returns };

InputFormat input_format_from_string(const std::string& text);

// A return series with its ingestion provenance.
struct ReturnsSeries {
  std::string label;
  std::vector<double> observations;
  std::string source_path;
  std::string transform;        // "log-returns" or "as-is"
  std::size_t rows_dropped = 0; // zero-price / non-finite rows removed
};

// Reads a comma- or tab-separated file with a header row and builds a
// return series from the selected value column. `column` is a header name
// (case-insensitive), a 0-based index, or empty for the last column.
//
// format = Prices: r_t = ln(P_t / P_{t-1}) for consecutive valid rows.
// Rows with a non-finite or non-positive price are dropped and counted;
// no return is formed across a dropped row.
// format = Returns: values taken as-is; non-finite rows dropped and counted.
//
// Throws MissingColumn, UnparsableRow (with the line number) and TooShort
// (fewer than 100 observations after the transform).
ReturnsSeries ingest(const std::filesystem::path& path, InputFormat format,
                     const std::string& column = "");

// Splits into `parts` contiguous equal blocks in chronological order.
// Throws NotDivisible when the length is not a multiple of parts.
std::vector<ReturnsSeries> split_periods(const ReturnsSeries& series,
                                         std::size_t parts);

// Histogram of the standardized data (mean 0, sd 1) with the standard
// normal density as an overlay column.
struct HistogramBin {
  double left;
  double right;
  std::size_t count;
  double density;         // count / (total * width)
  double normal_density;  // standard normal pdf at the bin midpoint
};

struct Histogram {
  std::vector<HistogramBin> bins;
  std::size_t total;
  double mean;    // of the raw data, used for standardization
  double stddev;
};

Histogram histogram(std::span<const double> data, std::size_t bins);

}  // namespace mctail

#endif  // MCTAIL_RETURNS_HPP
