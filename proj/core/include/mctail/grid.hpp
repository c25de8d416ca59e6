#ifndef MCTAIL_GRID_HPP
#define MCTAIL_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "mctail/hill.hpp"

namespace mctail {

inline constexpr double kDefaultGamma = 0.7071067811865476;  // sqrt(2)/2

// {1.01, 1.02, ..., 2.00}
std::vector<double> default_alpha0_values();

// Everything that determines a simulated expected-Hill-curve surface.
// Two identical specs (including master_seed) produce bit-identical
// surfaces, on any worker count.
struct GridSpec {
  std::size_t n = 1000;
  std::vector<double> alpha0_values = default_alpha0_values();
  std::size_t replications = 1000;
  double k_lo_fraction = 0.01;
  double k_hi_fraction = 0.20;
  double beta = 0.0;
  double gamma = kDefaultGamma;
  double delta = 0.0;
  TailMode tail_mode = TailMode::Upper;
  std::uint64_t master_seed = 0;

  void validate() const;
};

// Mean (and spread) of the Hill estimate per (alpha0, k) cell, averaged
// over the spec's replications. Row-major: row = alpha0 index, column =
// index into kgrid.k_values().
struct GridSurface {
  GridSpec spec;
  KGrid kgrid;
  std::vector<double> mean_curve;
  std::vector<double> stddev_curve;
  std::vector<std::uint32_t> exclusions;  // replications dropped per cell

  std::size_t rows() const noexcept { return spec.alpha0_values.size(); }
  std::size_t cols() const noexcept { return kgrid.size(); }
  std::size_t cell(std::size_t row, std::size_t col) const noexcept {
    return row * cols() + col;
  }
  double mean_at(std::size_t row, std::size_t col) const {
    return mean_curve[cell(row, col)];
  }
  double stddev_at(std::size_t row, std::size_t col) const {
    return stddev_curve[cell(row, col)];
  }
  // More than 1% of replications excluded: treat the cell with suspicion.
  bool cell_flagged(std::size_t row, std::size_t col) const {
    return exclusions[cell(row, col)] * 100 > spec.replications;
  }
};

using ProgressFn = std::function<void(std::size_t rows_done, std::size_t rows_total)>;

// Simulates the surface: for each (alpha0, replication), draws a stable
// sample on stream (alpha0 index, replication index), applies the spec's
// tail transform and averages the Hill curve per cell. Replications that
// fail at some k are dropped from that cell's mean and counted. Throws
// GridDegenerate if any cell loses every replication.
GridSurface simulate_grid(const GridSpec& spec, const ProgressFn& progress = {},
                          unsigned workers = 0);

// Versioned text format with a whole-file checksum; load(save(g)) is
// field-for-field identical, bit-exact on the matrices.
void save_grid(const GridSurface& surface, const std::filesystem::path& path);
GridSurface load_grid(const std::filesystem::path& path);

}  // namespace mctail

#endif  // MCTAIL_GRID_HPP
