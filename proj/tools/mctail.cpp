// Command line front end: grid management, estimation, studies and
// plot-data export. Every randomized command takes a seed (explicit or
// defaulted) and records it in its outputs; rerunning a command with the
// same inputs and seed reproduces every output byte for byte.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mctail/error.hpp"
#include "mctail/estimator.hpp"
#include "mctail/experiments.hpp"
#include "mctail/grid.hpp"
#include "mctail/returns.hpp"
#include "mctail/stable.hpp"

namespace {

using mctail::Error;
using mctail::ErrorCode;

constexpr std::size_t kLongRunThreshold = 10000;

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string field = (comma == std::string::npos)
                                  ? text.substr(start)
                                  : text.substr(start, comma - start);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0') {
      throw Error(ErrorCode::DomainError,
                  std::string("cannot parse ") + what + " entry '" + field + "'");
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.empty()) {
    throw Error(ErrorCode::DomainError, std::string("empty ") + what + " list");
  }
  return values;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> values;
  for (double v : parse_double_list(text, what)) {
    if (v < 1.0 || v != std::floor(v)) {
      throw Error(ErrorCode::DomainError,
                  std::string(what) + " entries must be positive integers");
    }
    values.push_back(static_cast<std::size_t>(v));
  }
  return values;
}

std::vector<double> make_alpha_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo <= hi)) {
    throw Error(ErrorCode::DomainError, "need alpha-min <= alpha-max and alpha-step > 0");
  }
  // Decimal bounds and steps (the usual case) are generated on the exact
  // decimal lattice, so a nominal grid always carries identical bits; the
  // default 1.01..2.00/0.01 then matches the library default exactly.
  double scale = 0.0;
  for (double m : {1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6}) {
    if (std::fabs(lo * m - std::round(lo * m)) < 1e-6 &&
        std::fabs(step * m - std::round(step * m)) < 1e-6) {
      scale = m;
      break;
    }
  }
  std::vector<double> values;
  if (scale > 0.0) {
    const double lo_ticks = std::round(lo * scale);
    const double step_ticks = std::round(step * scale);
    for (double v = lo_ticks; v <= hi * scale + 1e-9; v += step_ticks) {
      values.push_back(v / scale);
    }
  } else {
    for (int i = 0;; ++i) {
      const double a = lo + step * i;
      if (a > hi + 1e-12) break;
      values.push_back(a);
    }
  }
  return values;
}

void require_long_run(bool long_run, std::size_t length) {
  if (length > kLongRunThreshold && !long_run) {
    throw Error(ErrorCode::DomainError,
                "length " + std::to_string(length) +
                    " exceeds the desk-scale limit of " +
                    std::to_string(kLongRunThreshold) +
                    "; pass --long-run to allow it");
  }
}

void progress_to_stderr(std::size_t done, std::size_t total) {
  std::fprintf(stderr, "\r  simulating alpha0 grid: %zu/%zu rows", done, total);
  if (done == total) std::fputc('\n', stderr);
  std::fflush(stderr);
}

// ---------------------------------------------------------------------------
// grid simulate

int run_grid_simulate(const std::string& out, std::size_t n, std::size_t reps,
                      std::uint64_t seed, double alpha_min, double alpha_max,
                      double alpha_step, double k_lo, double k_hi,
                      const std::string& tail_mode, unsigned workers,
                      bool quiet) {
  mctail::GridSpec spec;
  spec.n = n;
  spec.replications = reps;
  spec.master_seed = seed;
  spec.alpha0_values = make_alpha_grid(alpha_min, alpha_max, alpha_step);
  spec.k_lo_fraction = k_lo;
  spec.k_hi_fraction = k_hi;
  spec.tail_mode = mctail::tail_mode_from_string(tail_mode);

  const mctail::GridSurface surface = mctail::simulate_grid(
      spec, quiet ? mctail::ProgressFn{} : progress_to_stderr, workers);
  mctail::save_grid(surface, out);
  std::cout << "grid: " << surface.rows() << " alpha0 values x "
            << surface.cols() << " k values (k in ["
            << surface.kgrid.k_values().front() << ", "
            << surface.kgrid.k_values().back() << "]), n = " << spec.n
            << ", replications = " << spec.replications
            << ", seed = " << spec.master_seed << "\n"
            << "wrote " << out << "\n";

  std::size_t flagged = 0;
  for (std::size_t r = 0; r < surface.rows(); ++r) {
    for (std::size_t c = 0; c < surface.cols(); ++c) {
      if (surface.cell_flagged(r, c)) ++flagged;
    }
  }
  if (flagged > 0) {
    std::cerr << "warning: " << flagged
              << " cell(s) lost more than 1% of their replications\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// estimate

struct PeriodResult {
  std::size_t period;
  mctail::McEstimate estimate;
  std::size_t length;
};

std::vector<double> column_levels(const mctail::McEstimate& est) {
  std::vector<double> below, above;
  for (const auto& [level, value] : est.quantiles) {
    (level < 0.5 ? below : above).push_back(level);
  }
  std::vector<double> ordered = below;
  ordered.insert(ordered.end(), above.begin(), above.end());
  return ordered;
}

int run_estimate(const std::string& data, const std::string& format,
                 const std::string& column, const std::string& grid_path,
                 std::size_t split, std::size_t ci_reps, std::uint64_t ci_seed,
                 const std::string& levels_text, const std::string& csv_out,
                 const std::string& json_out, unsigned workers) {
  const mctail::GridSurface grid = mctail::load_grid(grid_path);
  const mctail::ReturnsSeries series =
      mctail::ingest(data, mctail::input_format_from_string(format), column);
  const std::vector<double> levels =
      levels_text.empty() ? mctail::default_ci_levels()
                          : parse_double_list(levels_text, "levels");

  const auto periods = mctail::split_periods(series, split);
  std::vector<PeriodResult> results;
  results.reserve(periods.size());
  for (std::size_t p = 0; p < periods.size(); ++p) {
    const mctail::Sample sample(periods[p].observations);
    results.push_back(
        {p + 1,
         mctail::estimate_with_ci(sample, grid, levels, ci_reps, ci_seed, workers),
         periods[p].observations.size()});
  }

  // Metadata first, then one row per period: quantiles below the median,
  // the point estimate, quantiles above.
  const auto ordered = column_levels(results.front().estimate);
  std::cout << "# source=" << series.source_path
            << " transform=" << series.transform
            << " rows_dropped=" << series.rows_dropped << "\n";
  std::cout << "# grid=" << grid_path << " n=" << grid.spec.n << " tail_mode="
            << mctail::to_string(grid.spec.tail_mode)
            << " grid_seed=" << grid.spec.master_seed
            << " ci_reps=" << ci_reps << " ci_seed=" << ci_seed << "\n";

  std::cout << "period,n";
  for (double level : ordered) {
    if (level < 0.5)
      std::cout << ",q" << fmt(100.0 * level, "%g") << "%";
    else
      break;
  }
  std::cout << ",alpha_mc";
  for (double level : ordered) {
    if (level >= 0.5) std::cout << ",q" << fmt(100.0 * level, "%g") << "%";
  }
  std::cout << ",loss,ci_failures\n";

  auto emit_row = [&](std::ostream& os, const PeriodResult& r) {
    os << r.period << "," << r.length;
    for (double level : ordered) {
      if (level < 0.5) os << "," << fmt(r.estimate.quantiles.at(level), "%.4f");
    }
    os << "," << fmt(r.estimate.alpha_hat, "%.4f");
    for (double level : ordered) {
      if (level >= 0.5) os << "," << fmt(r.estimate.quantiles.at(level), "%.4f");
    }
    os << "," << fmt(r.estimate.loss) << "," << r.estimate.ci_failures << "\n";
  };
  for (const auto& r : results) emit_row(std::cout, r);

  if (!csv_out.empty()) {
    std::ofstream csv(csv_out, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(ErrorCode::IoError, "cannot open " + csv_out);
    csv << "# source=" << series.source_path << " grid=" << grid_path
        << " ci_reps=" << ci_reps << " ci_seed=" << ci_seed << "\n";
    csv << "period,n";
    for (double level : ordered)
      if (level < 0.5) csv << ",q" << fmt(100.0 * level, "%g") << "%";
    csv << ",alpha_mc";
    for (double level : ordered)
      if (level >= 0.5) csv << ",q" << fmt(100.0 * level, "%g") << "%";
    csv << ",loss,ci_failures\n";
    for (const auto& r : results) emit_row(csv, r);
    if (!csv.good()) throw Error(ErrorCode::IoError, "failed writing " + csv_out);
  }

  if (!json_out.empty()) {
    nlohmann::ordered_json doc;
    doc["command"] = "estimate";
    doc["source"] = series.source_path;
    doc["transform"] = series.transform;
    doc["rows_dropped"] = series.rows_dropped;
    doc["grid"] = {{"path", grid_path},
                   {"n", grid.spec.n},
                   {"replications", grid.spec.replications},
                   {"tail_mode", mctail::to_string(grid.spec.tail_mode)},
                   {"master_seed", grid.spec.master_seed}};
    doc["ci"] = {{"replications", ci_reps}, {"seed", ci_seed}};
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      nlohmann::ordered_json row;
      row["period"] = r.period;
      row["n"] = r.length;
      row["alpha_mc"] = r.estimate.alpha_hat;
      row["loss"] = r.estimate.loss;
      nlohmann::ordered_json q;
      for (const auto& [level, value] : r.estimate.quantiles) {
        q[fmt(level, "%g")] = value;
      }
      row["quantiles"] = std::move(q);
      row["ci_failures"] = r.estimate.ci_failures;
      list.push_back(std::move(row));
    }
    doc["periods"] = std::move(list);
    std::ofstream json_file(json_out, std::ios::binary | std::ios::trunc);
    if (!json_file) throw Error(ErrorCode::IoError, "cannot open " + json_out);
    json_file << doc.dump(2) << "\n";
    if (!json_file.good())
      throw Error(ErrorCode::IoError, "failed writing " + json_out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// hill-plot

int run_hill_plot(const std::string& data, const std::string& format,
                  const std::string& column, double k_lo, double k_hi,
                  double level, const std::string& tail_mode,
                  const std::string& out) {
  const mctail::ReturnsSeries series =
      mctail::ingest(data, mctail::input_format_from_string(format), column);
  const mctail::Sample raw(series.observations);
  const auto transformed =
      mctail::tail_transform(raw, mctail::tail_mode_from_string(tail_mode));
  const mctail::KGrid kgrid =
      mctail::KGrid::from_fractions(series.observations.size(), k_lo, k_hi);
  const mctail::HillCurve curve =
      mctail::hill_curve(transformed.sample, kgrid, level);

  std::ofstream csv(out, std::ios::binary | std::ios::trunc);
  if (!csv) throw Error(ErrorCode::IoError, "cannot open " + out);
  csv << "# source=" << series.source_path << " transform=" << series.transform
      << " tail_mode=" << tail_mode << " level=" << fmt(level, "%g") << "\n";
  csv << "k,k_fraction,estimate,ci_low,ci_high\n";
  const double n = static_cast<double>(series.observations.size());
  for (std::size_t i = 0; i < kgrid.size(); ++i) {
    csv << kgrid.k_values()[i] << ","
        << fmt(static_cast<double>(kgrid.k_values()[i]) / n, "%.12g") << ","
        << fmt(curve.estimates[i], "%.12g") << ","
        << fmt(curve.ci_low[i], "%.12g") << ","
        << fmt(curve.ci_high[i], "%.12g") << "\n";
  }
  if (!csv.good()) throw Error(ErrorCode::IoError, "failed writing " + out);
  std::cout << "wrote " << out << " (" << kgrid.size() << " k values)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// studies

int run_study_optimal_k(const std::string& lengths_text,
                        const std::string& alphas_text, std::size_t reps,
                        std::uint64_t seed, const std::string& out,
                        bool long_run, unsigned workers) {
  const auto lengths = parse_size_list(lengths_text, "lengths");
  for (std::size_t n : lengths) require_long_run(long_run, n);
  const auto alphas = parse_double_list(alphas_text, "alphas");
  const auto report = mctail::optimal_k_study(lengths, alphas, reps, seed, workers);
  mctail::write_report(report, out);
  std::cout << "wrote study '" << report.study_id << "' to " << out << "\n";
  return 0;
}

int run_study_small_k(std::size_t length, const std::string& alphas_text,
                      std::size_t reps, std::uint64_t seed,
                      const std::string& out, bool long_run, unsigned workers) {
  require_long_run(long_run, length);
  const auto alphas = parse_double_list(alphas_text, "alphas");
  const auto report = mctail::small_k_study(length, alphas, reps, seed, workers);
  mctail::write_report(report, out);
  std::cout << "wrote study '" << report.study_id << "' to " << out << "\n";
  return 0;
}

int run_study_quantiles(const std::string& grid_path,
                        const std::string& alphas_text, std::size_t reps,
                        std::uint64_t seed, const std::string& out,
                        unsigned workers) {
  const mctail::GridSurface grid = mctail::load_grid(grid_path);
  const auto alphas = parse_double_list(alphas_text, "alphas");
  const auto report =
      mctail::estimator_quantile_study(alphas, grid, reps, seed, workers);
  mctail::write_report(report, out);
  std::cout << "wrote study '" << report.study_id << "' to " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// hist

int run_hist(const std::string& data, const std::string& format,
             const std::string& column, std::size_t bins,
             const std::string& out) {
  const mctail::ReturnsSeries series =
      mctail::ingest(data, mctail::input_format_from_string(format), column);
  const mctail::Histogram hist = mctail::histogram(series.observations, bins);

  std::ofstream csv(out, std::ios::binary | std::ios::trunc);
  if (!csv) throw Error(ErrorCode::IoError, "cannot open " + out);
  csv << "# source=" << series.source_path << " observations=" << hist.total
      << " mean=" << fmt(hist.mean, "%.12g")
      << " stddev=" << fmt(hist.stddev, "%.12g")
      << " (bins on standardized data)\n";
  csv << "bin_left,bin_right,count,density,normal_density\n";
  for (const auto& bin : hist.bins) {
    csv << fmt(bin.left, "%.12g") << "," << fmt(bin.right, "%.12g") << ","
        << bin.count << "," << fmt(bin.density, "%.12g") << ","
        << fmt(bin.normal_density, "%.12g") << "\n";
  }
  if (!csv.good()) throw Error(ErrorCode::IoError, "failed writing " + out);
  std::cout << "wrote " << out << " (" << hist.bins.size() << " bins)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo tail exponent estimation for heavy-tailed series"};
  app.require_subcommand(1);

  unsigned workers = 0;
  app.add_option("--workers", workers,
                 "worker threads (0 = all cores); results do not depend on it");

  // grid simulate
  auto* grid_cmd = app.add_subcommand("grid", "simulated Hill-curve surfaces");
  grid_cmd->require_subcommand(1);
  grid_cmd->fallthrough();
  auto* grid_sim = grid_cmd->add_subcommand(
      "simulate", "simulate the expected Hill curve over an alpha0 grid");
  grid_sim->fallthrough();
  std::size_t g_n = 1000, g_reps = 1000;
  std::uint64_t g_seed = 1;
  std::string g_out;
  double g_amin = 1.01, g_amax = 2.0, g_astep = 0.01, g_klo = 0.01, g_khi = 0.20;
  std::string g_tail = "upper";
  bool g_quiet = false;
  grid_sim->add_option("--n", g_n, "series length the grid is simulated for");
  grid_sim->add_option("--reps", g_reps, "replications per alpha0");
  grid_sim->add_option("--seed", g_seed, "master seed (recorded in the file)");
  grid_sim->add_option("--out", g_out, "output grid cache path")->required();
  grid_sim->add_option("--alpha-min", g_amin, "smallest alpha0");
  grid_sim->add_option("--alpha-max", g_amax, "largest alpha0");
  grid_sim->add_option("--alpha-step", g_astep, "alpha0 step");
  grid_sim->add_option("--k-lo", g_klo, "lower k fraction");
  grid_sim->add_option("--k-hi", g_khi, "upper k fraction");
  grid_sim->add_option("--tail-mode", g_tail, "abs or upper");
  grid_sim->add_flag("--quiet", g_quiet, "suppress progress output");

  // estimate
  auto* est = app.add_subcommand("estimate",
                                 "match a return series against a grid");
  est->fallthrough();
  std::string e_data, e_format, e_column, e_grid, e_levels, e_csv, e_json;
  std::size_t e_split = 1, e_ci_reps = 100;
  std::uint64_t e_ci_seed = 1;
  est->add_option("--data", e_data, "delimited text file with a header row")->required();
  est->add_option("--format", e_format, "prices or returns")->required();
  est->add_option("--column", e_column, "value column (name or 0-based index)");
  est->add_option("--grid", e_grid, "grid cache path")->required();
  est->add_option("--split", e_split, "split into this many equal periods");
  est->add_option("--ci-reps", e_ci_reps, "confidence simulation replications");
  est->add_option("--ci-seed", e_ci_seed, "confidence simulation seed");
  est->add_option("--levels", e_levels, "comma-separated quantile levels");
  est->add_option("--csv", e_csv, "also write the table as CSV");
  est->add_option("--json", e_json, "also write the results as JSON");

  // hill-plot
  auto* plot = app.add_subcommand("hill-plot", "export a Hill curve as CSV");
  plot->fallthrough();
  std::string p_data, p_format, p_column, p_out, p_tail = "upper";
  double p_klo = 0.01, p_khi = 0.20, p_level = 0.95;
  plot->add_option("--data", p_data, "delimited text file")->required();
  plot->add_option("--format", p_format, "prices or returns")->required();
  plot->add_option("--column", p_column, "value column (name or 0-based index)");
  plot->add_option("--k-lo", p_klo, "lower k fraction");
  plot->add_option("--k-hi", p_khi, "upper k fraction");
  plot->add_option("--level", p_level, "confidence level of the bands");
  plot->add_option("--tail-mode", p_tail, "abs or upper");
  plot->add_option("--out", p_out, "output CSV path")->required();

  // study
  auto* study = app.add_subcommand("study", "seeded reproduction studies");
  study->require_subcommand(1);
  study->fallthrough();
  bool long_run = false;
  study->add_flag("--long-run", long_run,
                  "allow lengths beyond the desk-scale limit of 10000");

  auto* s_opt = study->add_subcommand("optimal-k",
                                      "optimal truncation in the 1%-20% band");
  s_opt->fallthrough();
  std::string so_lengths = "1000,10000";
  std::string so_alphas = "1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9,2.0";
  std::size_t so_reps = 200;
  std::uint64_t so_seed = 1;
  std::string so_out;
  s_opt->add_option("--lengths", so_lengths, "comma-separated series lengths");
  s_opt->add_option("--alphas", so_alphas, "comma-separated tail exponents");
  s_opt->add_option("--reps", so_reps, "replications per cell");
  s_opt->add_option("--seed", so_seed, "study seed");
  s_opt->add_option("--out", so_out, "output directory")->required();

  auto* s_small = study->add_subcommand("small-k",
                                        "usable truncation range below 1%");
  s_small->fallthrough();
  std::size_t ss_length = 10000;
  std::string ss_alphas = "1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9,2.0";
  std::size_t ss_reps = 200;
  std::uint64_t ss_seed = 1;
  std::string ss_out;
  s_small->add_option("--length", ss_length, "series length");
  s_small->add_option("--alphas", ss_alphas, "comma-separated tail exponents");
  s_small->add_option("--reps", ss_reps, "replications per alpha");
  s_small->add_option("--seed", ss_seed, "study seed");
  s_small->add_option("--out", ss_out, "output directory")->required();

  auto* s_q = study->add_subcommand("quantiles",
                                    "simulated estimator quantiles per alpha");
  s_q->fallthrough();
  std::string sq_grid, sq_alphas = "1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9,2.0";
  std::size_t sq_reps = 100;
  std::uint64_t sq_seed = 1;
  std::string sq_out;
  s_q->add_option("--grid", sq_grid, "grid cache path")->required();
  s_q->add_option("--alphas", sq_alphas, "comma-separated tail exponents");
  s_q->add_option("--reps", sq_reps, "simulations per alpha");
  s_q->add_option("--seed", sq_seed, "study seed");
  s_q->add_option("--out", sq_out, "output directory")->required();

  // hist
  auto* hist = app.add_subcommand("hist",
                                  "histogram bin data with a normal overlay");
  hist->fallthrough();
  std::string h_data, h_format = "returns", h_column, h_out;
  std::size_t h_bins = 50;
  hist->add_option("--data", h_data, "delimited text file")->required();
  hist->add_option("--format", h_format, "prices or returns");
  hist->add_option("--column", h_column, "value column (name or 0-based index)");
  hist->add_option("--bins", h_bins, "number of bins")->required();
  hist->add_option("--out", h_out, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (grid_sim->parsed()) {
      return run_grid_simulate(g_out, g_n, g_reps, g_seed, g_amin, g_amax,
                               g_astep, g_klo, g_khi, g_tail, workers, g_quiet);
    }
    if (est->parsed()) {
      return run_estimate(e_data, e_format, e_column, e_grid, e_split,
                          e_ci_reps, e_ci_seed, e_levels, e_csv, e_json,
                          workers);
    }
    if (plot->parsed()) {
      return run_hill_plot(p_data, p_format, p_column, p_klo, p_khi, p_level,
                           p_tail, p_out);
    }
    if (s_opt->parsed()) {
      return run_study_optimal_k(so_lengths, so_alphas, so_reps, so_seed,
                                 so_out, long_run, workers);
    }
    if (s_small->parsed()) {
      return run_study_small_k(ss_length, ss_alphas, ss_reps, ss_seed, ss_out,
                               long_run, workers);
    }
    if (s_q->parsed()) {
      return run_study_quantiles(sq_grid, sq_alphas, sq_reps, sq_seed, sq_out,
                                 workers);
    }
    if (hist->parsed()) {
      return run_hist(h_data, h_format, h_column, h_bins, h_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.tagged_message() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
