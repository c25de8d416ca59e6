#include "mctail/grid.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>

#include "mctail/parallel.hpp"
#include "mctail/stable.hpp"
#include "mctail/stats.hpp"

namespace mctail {

namespace {

constexpr std::string_view kFormatTag = "mctail-grid-v1";

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> default_alpha0_values() {
  std::vector<double> values(100);
  for (int i = 0; i < 100; ++i) {
    values[i] = static_cast<double>(101 + i) / 100.0;
  }
  return values;
}

void GridSpec::validate() const {
  if (n < 2) {
    throw Error(ErrorCode::DomainError, "grid n must be at least 2");
  }
  if (replications < 1) {
    throw Error(ErrorCode::DomainError, "grid needs at least 1 replication");
  }
  if (alpha0_values.empty()) {
    throw Error(ErrorCode::DomainError, "alpha0 grid is empty");
  }
  double prev = 1.0;
  for (double a : alpha0_values) {
    if (!(a > 1.0 && a <= 2.0)) {
      throw Error(ErrorCode::DomainError,
                  "alpha0 values must lie in (1,2], got " + std::to_string(a));
    }
    if (!(a > prev) && a != alpha0_values.front()) {
      throw Error(ErrorCode::DomainError, "alpha0 values must be ascending");
    }
    prev = a;
  }
  StableParams{alpha0_values.front(), beta, gamma, delta}.validate();
}

GridSurface simulate_grid(const GridSpec& spec, const ProgressFn& progress,
                          unsigned workers) {
  spec.validate();
  const KGrid kgrid = KGrid::from_fractions(spec.n, spec.k_lo_fraction,
                                            spec.k_hi_fraction);
  const std::size_t rows = spec.alpha0_values.size();
  const std::size_t cols = kgrid.size();

  GridSurface surface{spec, kgrid,
                      std::vector<double>(rows * cols, 0.0),
                      std::vector<double>(rows * cols, 0.0),
                      std::vector<std::uint32_t>(rows * cols, 0)};

  std::mutex progress_mutex;
  std::size_t rows_done = 0;

  parallel_for_index(rows, workers, [&](std::size_t row) {
    const StableParams params{spec.alpha0_values[row], spec.beta, spec.gamma,
                              spec.delta};
    std::vector<RunningMoments> cells(cols);

    // Replications run in index order so the per-cell reduction is the same
    // no matter how rows are scheduled across workers.
    for (std::size_t rep = 0; rep < spec.replications; ++rep) {
      const RngStream stream{spec.master_seed, row, rep};
      const Sample draws = sample(params, spec.n, stream);

      bool rep_usable = true;
      const std::vector<double>* ascending = nullptr;
      Sample transformed(std::vector<double>{0.0});
      try {
        transformed = tail_transform(draws, spec.tail_mode).sample;
        ascending = &transformed.ascending();
      } catch (const Error&) {
        rep_usable = false;  // nothing positive in this draw
      }

      for (std::size_t col = 0; col < cols; ++col) {
        double sum = 0.0;
        if (rep_usable &&
            detail::hill_log2_spacing_sum(*ascending, kgrid.k_values()[col],
                                          sum) == detail::HillStatus::Ok) {
          cells[col].add(detail::hill_from_log2_sum(kgrid.k_values()[col], sum));
        } else {
          ++surface.exclusions[surface.cell(row, col)];
        }
      }
    }

    for (std::size_t col = 0; col < cols; ++col) {
      const std::size_t idx = surface.cell(row, col);
      surface.mean_curve[idx] = cells[col].mean();
      surface.stddev_curve[idx] = cells[col].stddev();
      if (cells[col].count() == 0) {
        // Recorded here, reported after the parallel region.
        surface.mean_curve[idx] = std::numeric_limits<double>::quiet_NaN();
      }
    }

    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(++rows_done, rows);
    }
  });

  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t col = 0; col < cols; ++col) {
      if (std::isnan(surface.mean_at(row, col))) {
        throw Error(ErrorCode::GridDegenerate,
                    "every replication failed at alpha0 = " +
                        std::to_string(spec.alpha0_values[row]) +
                        ", k = " + std::to_string(kgrid.k_values()[col]));
      }
    }
  }
  return surface;
}

void save_grid(const GridSurface& surface, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "format=" << kFormatTag << "\n";
  out << "master_seed=" << surface.spec.master_seed << "\n";
  out << "n=" << surface.spec.n << "\n";
  out << "replications=" << surface.spec.replications << "\n";
  out << "beta=" << format_double(surface.spec.beta) << "\n";
  out << "gamma=" << format_double(surface.spec.gamma) << "\n";
  out << "delta=" << format_double(surface.spec.delta) << "\n";
  out << "tail_mode=" << to_string(surface.spec.tail_mode) << "\n";
  out << "k_lo_fraction=" << format_double(surface.spec.k_lo_fraction) << "\n";
  out << "k_hi_fraction=" << format_double(surface.spec.k_hi_fraction) << "\n";
  out << "alpha0_count=" << surface.spec.alpha0_values.size() << "\n";
  out << "alpha0_values=";
  for (std::size_t i = 0; i < surface.spec.alpha0_values.size(); ++i) {
    if (i) out << ' ';
    out << format_double(surface.spec.alpha0_values[i]);
  }
  out << "\n";
  out << "k_count=" << surface.kgrid.size() << "\n";
  out << "k_lo=" << surface.kgrid.k_values().front() << "\n";
  out << "k_hi=" << surface.kgrid.k_values().back() << "\n";

  const std::size_t rows = surface.rows();
  const std::size_t cols = surface.cols();
  auto write_matrix = [&](const char* name, auto getter) {
    out << "matrix=" << name << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (c) out << ' ';
        out << getter(r, c);
      }
      out << "\n";
    }
  };
  write_matrix("mean", [&](std::size_t r, std::size_t c) {
    return format_double(surface.mean_at(r, c));
  });
  write_matrix("stddev", [&](std::size_t r, std::size_t c) {
    return format_double(surface.stddev_at(r, c));
  });
  write_matrix("exclusions", [&](std::size_t r, std::size_t c) {
    return std::to_string(surface.exclusions[surface.cell(r, c)]);
  });

  const std::string body = out.str();
  char checksum[32];
  std::snprintf(checksum, sizeof(checksum), "%016" PRIx64, fnv1a64(body));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  }
  file << body << "checksum=" << checksum << "\n";
  file.flush();
  if (!file) {
    throw Error(ErrorCode::IoError, "failed while writing " + path.string());
  }
}

namespace {

class GridReader {
 public:
  explicit GridReader(std::string text) : text_(std::move(text)) {}

  // Consumes the next line and returns the value of "key=value"; throws
  // SpecIncompatible when the key differs or the file ends early.
  std::string expect_key(const std::string& key) {
    const std::string line = next_line();
    const std::string prefix = key + "=";
    if (line.rfind(prefix, 0) != 0) {
      throw Error(ErrorCode::SpecIncompatible,
                  "grid cache: expected '" + key + "=...', got '" + line + "'");
    }
    return line.substr(prefix.size());
  }

  std::string next_line() {
    if (pos_ >= text_.size()) {
      throw Error(ErrorCode::SpecIncompatible, "grid cache: unexpected end of file");
    }
    const std::size_t eol = text_.find('\n', pos_);
    if (eol == std::string::npos) {
      throw Error(ErrorCode::SpecIncompatible, "grid cache: missing final newline");
    }
    std::string line = text_.substr(pos_, eol - pos_);
    pos_ = eol + 1;
    return line;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw Error(ErrorCode::SpecIncompatible, "grid cache: bad number '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text) {
  char* end = nullptr;
  const std::uint64_t v = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0') {
    throw Error(ErrorCode::SpecIncompatible, "grid cache: bad integer '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (start <= line.size()) {
    const std::size_t sp = line.find(' ', start);
    if (sp == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, sp - start));
    start = sp + 1;
  }
  return fields;
}

}  // namespace

GridSurface load_grid(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();

  // Version first: an edited version field reports as a version problem,
  // not as the checksum mismatch it also causes.
  const std::size_t first_eol = text.find('\n');
  const std::string first_line =
      (first_eol == std::string::npos) ? text : text.substr(0, first_eol);
  const std::string expected_first = std::string("format=") + std::string(kFormatTag);
  if (first_line != expected_first) {
    throw Error(ErrorCode::FormatVersionMismatch,
                "grid cache: unsupported format '" + first_line + "'");
  }

  const std::string checksum_prefix = "checksum=";
  const std::size_t checksum_pos = text.rfind("\nchecksum=");
  if (checksum_pos == std::string::npos || !text.ends_with("\n")) {
    throw Error(ErrorCode::ChecksumMismatch, "grid cache: missing checksum line");
  }
  const std::size_t body_len = checksum_pos + 1;
  const std::string checksum_line =
      text.substr(body_len, text.size() - body_len - 1);
  char expected[32];
  std::snprintf(expected, sizeof(expected), "checksum=%016" PRIx64,
                fnv1a64(std::string_view(text).substr(0, body_len)));
  if (checksum_line != expected) {
    throw Error(ErrorCode::ChecksumMismatch,
                "grid cache: checksum mismatch (file corrupt or truncated)");
  }

  GridReader reader(text.substr(0, body_len));
  reader.expect_key("format");

  GridSpec spec;
  spec.master_seed = parse_u64(reader.expect_key("master_seed"));
  spec.n = static_cast<std::size_t>(parse_u64(reader.expect_key("n")));
  spec.replications =
      static_cast<std::size_t>(parse_u64(reader.expect_key("replications")));
  spec.beta = parse_double(reader.expect_key("beta"));
  spec.gamma = parse_double(reader.expect_key("gamma"));
  spec.delta = parse_double(reader.expect_key("delta"));
  spec.tail_mode = tail_mode_from_string(reader.expect_key("tail_mode"));
  spec.k_lo_fraction = parse_double(reader.expect_key("k_lo_fraction"));
  spec.k_hi_fraction = parse_double(reader.expect_key("k_hi_fraction"));

  const std::size_t alpha_count =
      static_cast<std::size_t>(parse_u64(reader.expect_key("alpha0_count")));
  const auto alpha_fields = split_fields(reader.expect_key("alpha0_values"));
  if (alpha_fields.size() != alpha_count) {
    throw Error(ErrorCode::SpecIncompatible,
                "grid cache: alpha0_count does not match the value list");
  }
  spec.alpha0_values.clear();
  spec.alpha0_values.reserve(alpha_count);
  for (const auto& f : alpha_fields) spec.alpha0_values.push_back(parse_double(f));
  spec.validate();

  const std::size_t k_count =
      static_cast<std::size_t>(parse_u64(reader.expect_key("k_count")));
  const std::size_t k_lo =
      static_cast<std::size_t>(parse_u64(reader.expect_key("k_lo")));
  const std::size_t k_hi =
      static_cast<std::size_t>(parse_u64(reader.expect_key("k_hi")));
  const KGrid kgrid = KGrid::from_bounds(spec.n, k_lo, k_hi);
  if (kgrid.size() != k_count) {
    throw Error(ErrorCode::SpecIncompatible, "grid cache: inconsistent k grid");
  }
  const KGrid from_spec =
      KGrid::from_fractions(spec.n, spec.k_lo_fraction, spec.k_hi_fraction);
  if (from_spec.k_values() != kgrid.k_values()) {
    throw Error(ErrorCode::SpecIncompatible,
                "grid cache: k grid does not match the stored fractions");
  }

  const std::size_t rows = alpha_count;
  const std::size_t cols = k_count;
  GridSurface surface{std::move(spec), kgrid, {}, {}, {}};
  surface.mean_curve.reserve(rows * cols);
  surface.stddev_curve.reserve(rows * cols);
  surface.exclusions.reserve(rows * cols);

  auto read_matrix = [&](const char* name, auto&& push) {
    const std::string header = reader.expect_key("matrix");
    if (header != name) {
      throw Error(ErrorCode::SpecIncompatible,
                  std::string("grid cache: expected matrix '") + name + "'");
    }
    for (std::size_t r = 0; r < rows; ++r) {
      const auto fields = split_fields(reader.next_line());
      if (fields.size() != cols) {
        throw Error(ErrorCode::SpecIncompatible,
                    std::string("grid cache: short row in matrix '") + name + "'");
      }
      for (const auto& f : fields) push(f);
    }
  };
  read_matrix("mean", [&](const std::string& f) {
    const double v = parse_double(f);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::SpecIncompatible,
                  "grid cache: mean cell must be positive and finite");
    }
    surface.mean_curve.push_back(v);
  });
  read_matrix("stddev", [&](const std::string& f) {
    surface.stddev_curve.push_back(parse_double(f));
  });
  read_matrix("exclusions", [&](const std::string& f) {
    surface.exclusions.push_back(static_cast<std::uint32_t>(parse_u64(f)));
  });

  return surface;
}

}  // namespace mctail
