#include "mctail/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mctail/estimator.hpp"
#include "mctail/parallel.hpp"
#include "mctail/rng.hpp"
#include "mctail/stable.hpp"
#include "mctail/stats.hpp"

namespace mctail {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_alpha(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", alpha);
  return buf;
}

std::string join_sizes(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

std::string join_alphas(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_alpha(values[i]);
  }
  return out;
}

void require_alphas_in_range(const std::vector<double>& alphas) {
  if (alphas.empty()) {
    throw Error(ErrorCode::DomainError, "study needs at least one alpha");
  }
  for (double a : alphas) {
    if (!(a > 1.0 && a <= 2.0)) {
      throw Error(ErrorCode::DomainError,
                  "study alphas must lie in (1,2], got " + std::to_string(a));
    }
  }
}

// Per-k recomputation costs O(sum of k); above this many k values a
// prefix-sum pass over the top order statistics is used instead, which is
// O(k_max) per curve and equal up to rounding. Keeps the million-length
// study runs tractable.
constexpr std::size_t kPrefixPathThreshold = 4096;

void accumulate_curve(const std::vector<double>& ascending, const KGrid& kgrid,
                      std::vector<RunningMoments>& cells) {
  const std::size_t n = ascending.size();
  if (kgrid.size() <= kPrefixPathThreshold) {
    for (std::size_t col = 0; col < kgrid.size(); ++col) {
      double sum = 0.0;
      if (detail::hill_log2_spacing_sum(ascending, kgrid.k_values()[col], sum) ==
          detail::HillStatus::Ok) {
        cells[col].add(detail::hill_from_log2_sum(kgrid.k_values()[col], sum));
      }
    }
    return;
  }

  const std::size_t k_max = kgrid.k_values().back();
  if (k_max >= n) return;
  // prefix[j] = sum of log2 of the j largest values; valid while positive.
  std::size_t usable = 0;
  std::vector<double> logs(k_max + 1, 0.0);
  std::vector<double> prefix(k_max + 2, 0.0);
  for (std::size_t j = 0; j <= k_max; ++j) {
    const double v = ascending[n - 1 - j];
    if (!(v > 0.0)) break;
    logs[j] = std::log2(v);
    prefix[j + 1] = prefix[j] + logs[j];
    usable = j + 1;
  }
  for (std::size_t col = 0; col < kgrid.size(); ++col) {
    const std::size_t k = kgrid.k_values()[col];
    if (k + 1 > usable) continue;  // threshold not positive
    const double sum = prefix[k] - static_cast<double>(k) * logs[k];
    if (sum == 0.0) continue;  // degenerate tail
    cells[col].add(detail::hill_from_log2_sum(k, sum));
  }
}

// Mean Hill curve (with exclusions dropped) over seeded replications of
// S(alpha, 0, sqrt(2)/2, 0), upper-tail convention.
std::vector<double> mean_hill_curve(double alpha, std::size_t n,
                                    const KGrid& kgrid, std::size_t replications,
                                    std::uint64_t seed, std::uint64_t cell_index) {
  const StableParams params{alpha, 0.0, kDefaultGamma, 0.0};
  std::vector<RunningMoments> cells(kgrid.size());

  for (std::size_t rep = 0; rep < replications; ++rep) {
    const Sample draws = sample(params, n, {seed, cell_index, rep});
    const Sample transformed = tail_transform(draws, TailMode::Upper).sample;
    accumulate_curve(transformed.ascending(), kgrid, cells);
  }

  std::vector<double> mean(kgrid.size());
  for (std::size_t col = 0; col < kgrid.size(); ++col) {
    mean[col] = cells[col].count() ? cells[col].mean() : kNan;
  }
  return mean;
}

StudyTable curve_table(const std::string& name, const KGrid& kgrid,
                       const std::vector<double>& mean) {
  StudyTable table{name, {"k", "k_pct", "mean_estimate"}, {}};
  table.rows.reserve(kgrid.size());
  for (std::size_t col = 0; col < kgrid.size(); ++col) {
    const double k = static_cast<double>(kgrid.k_values()[col]);
    table.rows.push_back({k, 100.0 * k / static_cast<double>(kgrid.n()), mean[col]});
  }
  return table;
}

}  // namespace

const StudyTable& StudyReport::table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::DomainError, "no table named '" + name + "' in study " + study_id);
}

StudyReport optimal_k_study(const std::vector<std::size_t>& lengths,
                            const std::vector<double>& alphas,
                            std::size_t replications, std::uint64_t seed,
                            unsigned workers) {
  if (lengths.empty()) {
    throw Error(ErrorCode::DomainError, "study needs at least one length");
  }
  for (std::size_t n : lengths) {
    if (n < 100) {
      throw Error(ErrorCode::DomainError,
                  "study lengths must be at least 100, got " + std::to_string(n));
    }
  }
  require_alphas_in_range(alphas);
  if (replications < 1) {
    throw Error(ErrorCode::DomainError, "study needs at least 1 replication");
  }

  StudyReport report;
  report.study_id = "optimal-k";
  report.parameters = {{"lengths", join_sizes(lengths)},
                       {"alphas", join_alphas(alphas)},
                       {"replications", std::to_string(replications)},
                       {"seed", std::to_string(seed)}};
  report.generated_at = std::chrono::system_clock::now();

  const std::size_t cell_count = lengths.size() * alphas.size();
  std::vector<std::vector<double>> curves(cell_count);
  std::vector<KGrid> kgrids;
  kgrids.reserve(lengths.size());
  for (std::size_t n : lengths) kgrids.push_back(KGrid::from_fractions(n));

  parallel_for_index(cell_count, workers, [&](std::size_t cell) {
    const std::size_t li = cell / alphas.size();
    const std::size_t ai = cell % alphas.size();
    curves[cell] = mean_hill_curve(alphas[ai], lengths[li], kgrids[li],
                                   replications, seed, cell);
  });

  StudyTable summary{
      "optimal_k",
      {"n", "alpha", "k_opt", "k_opt_pct", "mean_at_k_opt", "abs_error", "boundary"},
      {}};
  for (std::size_t cell = 0; cell < cell_count; ++cell) {
    const std::size_t li = cell / alphas.size();
    const std::size_t ai = cell % alphas.size();
    const KGrid& kgrid = kgrids[li];
    const std::vector<double>& mean = curves[cell];

    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t col = 0; col < kgrid.size(); ++col) {
      if (std::isnan(mean[col])) continue;
      const double err = std::fabs(mean[col] - alphas[ai]);
      if (err < best_err) {
        best_err = err;
        best = col;
      }
    }
    if (!std::isfinite(best_err)) {
      throw Error(ErrorCode::GridDegenerate,
                  "no usable replication for n = " + std::to_string(lengths[li]) +
                      ", alpha = " + format_alpha(alphas[ai]));
    }

    const double k_opt = static_cast<double>(kgrid.k_values()[best]);
    const bool boundary = (best == 0) || (best + 1 == kgrid.size());
    summary.rows.push_back({static_cast<double>(lengths[li]), alphas[ai], k_opt,
                            100.0 * k_opt / static_cast<double>(lengths[li]),
                            mean[best], best_err, boundary ? 1.0 : 0.0});

    report.tables.push_back(curve_table("curve_n" + std::to_string(lengths[li]) +
                                            "_alpha" + format_alpha(alphas[ai]),
                                        kgrid, mean));
  }
  report.tables.insert(report.tables.begin(), std::move(summary));
  return report;
}

StudyReport small_k_study(std::size_t length, const std::vector<double>& alphas,
                          std::size_t replications, std::uint64_t seed,
                          unsigned workers) {
  if (length < 100) {
    throw Error(ErrorCode::DomainError, "small-k study needs length >= 100");
  }
  require_alphas_in_range(alphas);
  if (replications < 1) {
    throw Error(ErrorCode::DomainError, "study needs at least 1 replication");
  }

  const std::size_t k_hi = length / 100;  // floor(1% of n)
  const KGrid kgrid = KGrid::from_bounds(length, 1, k_hi);

  StudyReport report;
  report.study_id = "small-k";
  report.parameters = {{"length", std::to_string(length)},
                       {"alphas", join_alphas(alphas)},
                       {"replications", std::to_string(replications)},
                       {"seed", std::to_string(seed)}};
  report.generated_at = std::chrono::system_clock::now();

  std::vector<std::vector<double>> curves(alphas.size());
  parallel_for_index(alphas.size(), workers, [&](std::size_t ai) {
    curves[ai] = mean_hill_curve(alphas[ai], length, kgrid, replications, seed, ai);
  });

  StudyTable summary{"small_k_ranges",
                     {"alpha", "k_lo", "k_hi", "k_lo_pct", "k_hi_pct",
                      "range_len", "empty"},
                     {}};
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    const std::vector<double>& mean = curves[ai];

    // Widest contiguous run with |mean/alpha - 1| <= 5%.
    std::size_t best_start = 0, best_len = 0, run_start = 0, run_len = 0;
    for (std::size_t col = 0; col < mean.size(); ++col) {
      const bool ok = !std::isnan(mean[col]) &&
                      std::fabs(mean[col] / alphas[ai] - 1.0) <= 0.05;
      if (ok) {
        if (run_len == 0) run_start = col;
        ++run_len;
        if (run_len > best_len) {
          best_len = run_len;
          best_start = run_start;
        }
      } else {
        run_len = 0;
      }
    }

    const double n = static_cast<double>(length);
    if (best_len == 0) {
      summary.rows.push_back({alphas[ai], kNan, kNan, kNan, kNan, 0.0, 1.0});
    } else {
      const double lo = static_cast<double>(kgrid.k_values()[best_start]);
      const double hi = static_cast<double>(kgrid.k_values()[best_start + best_len - 1]);
      summary.rows.push_back({alphas[ai], lo, hi, 100.0 * lo / n, 100.0 * hi / n,
                              static_cast<double>(best_len), 0.0});
    }
    report.tables.push_back(curve_table("curve_alpha" + format_alpha(alphas[ai]),
                                        kgrid, mean));
  }
  report.tables.insert(report.tables.begin(), std::move(summary));
  return report;
}

StudyReport estimator_quantile_study(const std::vector<double>& alphas,
                                     const GridSurface& grid,
                                     std::size_t replications,
                                     std::uint64_t seed, unsigned workers) {
  require_alphas_in_range(alphas);

  static const std::vector<double> levels{0.005, 0.025, 0.05, 0.5,
                                          0.95,  0.975, 0.995};

  StudyReport report;
  report.study_id = "quantiles";
  report.parameters = {{"alphas", join_alphas(alphas)},
                       {"n", std::to_string(grid.spec.n)},
                       {"grid_seed", std::to_string(grid.spec.master_seed)},
                       {"replications", std::to_string(replications)},
                       {"seed", std::to_string(seed)}};
  report.generated_at = std::chrono::system_clock::now();

  StudyTable table{"quantiles",
                   {"alpha", "q0.5", "q2.5", "q5", "point", "q95", "q97.5",
                    "q99.5", "failures"},
                   {}};

  // One derived sub-seed per alpha keeps the per-alpha confidence
  // simulations on disjoint streams.
  std::uint64_t chain = seed;
  for (double alpha : alphas) {
    const std::uint64_t sub_seed = detail::splitmix64(chain);
    std::size_t failures = 0;
    const auto q = confidence_quantiles(alpha, grid, levels, replications,
                                        sub_seed, &failures, workers);
    table.rows.push_back({alpha, q.at(0.005), q.at(0.025), q.at(0.05),
                          q.at(0.5), q.at(0.95), q.at(0.975), q.at(0.995),
                          static_cast<double>(failures)});
  }
  report.tables.push_back(std::move(table));
  return report;
}

void write_report(const StudyReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  }

  nlohmann::ordered_json manifest;
  manifest["format"] = "mctail-study-v1";
  manifest["study_id"] = report.study_id;
  nlohmann::ordered_json params;
  for (const auto& [key, value] : report.parameters) params[key] = value;
  manifest["parameters"] = std::move(params);

  nlohmann::ordered_json table_list = nlohmann::ordered_json::array();
  for (const auto& table : report.tables) {
    const std::filesystem::path file = dir / (table.name + ".csv");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::IoError, "cannot open " + file.string() + " for writing");
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << ',';
      out << table.columns[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        out << format_cell(row[c]);
      }
      out << "\n";
    }
    out.flush();
    if (!out) {
      throw Error(ErrorCode::IoError, "failed while writing " + file.string());
    }

    nlohmann::ordered_json entry;
    entry["name"] = table.name;
    entry["file"] = table.name + ".csv";
    entry["columns"] = table.columns;
    entry["rows"] = table.rows.size();
    table_list.push_back(std::move(entry));
  }
  manifest["tables"] = std::move(table_list);

  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError,
                "cannot open " + manifest_path.string() + " for writing");
  }
  out << manifest.dump(2) << "\n";
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoError, "failed while writing " + manifest_path.string());
  }
}

}  // namespace mctail
