#ifndef MCTAIL_EXPERIMENTS_HPP
#define MCTAIL_EXPERIMENTS_HPP

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mctail/grid.hpp"

namespace mctail {

struct StudyTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// One scripted, seeded experiment. Tables are fully determined by
// (study_id, parameters, seed): a rerun reproduces them cell for cell.
// generated_at is in-memory bookkeeping only; serialized outputs carry no
// timestamp so reruns stay byte-identical.
struct StudyReport {
  std::string study_id;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<StudyTable> tables;
  std::chrono::system_clock::time_point generated_at;

  const StudyTable& table(const std::string& name) const;
};

// For each (length, alpha): average Hill curves over k in the 1%-20%
// band across seeded stable replications and report the k minimizing
// |mean estimate - alpha|, as a percentage of the length. Optima attained
// at the band edge are flagged (column `boundary`), since the true optimum
// may lie outside the searched band. Emits the per-cell mean curves too.
StudyReport optimal_k_study(const std::vector<std::size_t>& lengths,
                            const std::vector<double>& alphas,
                            std::size_t replications, std::uint64_t seed,
                            unsigned workers = 0);

// Mean Hill curve on k in (0, 1%] of the length; reports the widest
// contiguous k range whose mean estimate stays within 5% of alpha.
// An empty range is reported as such (column `empty`).
StudyReport small_k_study(std::size_t length, const std::vector<double>& alphas,
                          std::size_t replications, std::uint64_t seed,
                          unsigned workers = 0);

// Simulated quantiles of the grid-matching estimator per alpha: the
// 0.5/2.5/5/95/97.5/99.5 percentiles plus the median as the point column.
StudyReport estimator_quantile_study(const std::vector<double>& alphas,
                                     const GridSurface& grid,
                                     std::size_t replications,
                                     std::uint64_t seed, unsigned workers = 0);

// Writes every table as <dir>/<name>.csv plus <dir>/manifest.json.
// Output bytes depend only on the report's tables and parameters.
void write_report(const StudyReport& report, const std::filesystem::path& dir);

}  // namespace mctail

#endif  // MCTAIL_EXPERIMENTS_HPP
