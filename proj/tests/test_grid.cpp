#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mctail/grid.hpp"
#include "mctail/stable.hpp"
#include "mctail/stats.hpp"

using namespace mctail;

namespace {

GridSpec small_spec() {
  GridSpec spec;
  spec.n = 300;
  spec.alpha0_values = {1.2, 1.5, 1.8};
  spec.replications = 40;
  spec.master_seed = 404;
  return spec;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

// Same hash as the writer; test-side oracle for forging valid checksums.
std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

ErrorCode load_error(const std::filesystem::path& path) {
  try {
    load_grid(path);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected load_grid to fail");
  return ErrorCode::DomainError;
}

}  // namespace

TEST_CASE("grid spec: default alpha0 grid and k grid dimensions") {
  const GridSpec spec;
  CHECK(spec.alpha0_values.size() == 100);
  CHECK(spec.alpha0_values.front() == doctest::Approx(1.01));
  CHECK(spec.alpha0_values.back() == 2.0);
  CHECK(spec.replications == 1000);
  CHECK(spec.gamma == doctest::Approx(std::sqrt(2.0) / 2.0));

  // n = 1000 at the default fractions: a 100 x 191 surface, k in [10, 200].
  const KGrid kgrid = KGrid::from_fractions(spec.n, spec.k_lo_fraction,
                                            spec.k_hi_fraction);
  CHECK(spec.alpha0_values.size() * kgrid.size() == 100 * 191);

  GridSpec bad = spec;
  bad.alpha0_values = {0.9};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.alpha0_values = {1.5, 1.4};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("simulate: schedule-independent and rerun-stable") {
  const GridSpec spec = small_spec();
  const GridSurface w1 = simulate_grid(spec, {}, 1);
  const GridSurface w3 = simulate_grid(spec, {}, 3);
  const GridSurface again = simulate_grid(spec, {}, 1);

  CHECK(w1.mean_curve == w3.mean_curve);
  CHECK(w1.stddev_curve == w3.stddev_curve);
  CHECK(w1.exclusions == w3.exclusions);
  CHECK(w1.mean_curve == again.mean_curve);

  for (double v : w1.mean_curve) {
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("simulate: cells are the exact running means of the documented streams") {
  const GridSpec spec = small_spec();
  const GridSurface surface = simulate_grid(spec, {}, 2);
  const KGrid& kgrid = surface.kgrid;

  for (std::size_t row = 0; row < surface.rows(); ++row) {
    std::vector<RunningMoments> recomputed(surface.cols());
    std::vector<double> low(surface.cols(), 1e300), high(surface.cols(), -1e300);
    for (std::size_t rep = 0; rep < spec.replications; ++rep) {
      const Sample draws = sample({spec.alpha0_values[row], spec.beta,
                                   spec.gamma, spec.delta},
                                  spec.n, {spec.master_seed, row, rep});
      const Sample tail = tail_transform(draws, spec.tail_mode).sample;
      for (std::size_t col = 0; col < surface.cols(); ++col) {
        const double est = hill_estimate(tail, kgrid.k_values()[col]);
        recomputed[col].add(est);
        low[col] = std::min(low[col], est);
        high[col] = std::max(high[col], est);
      }
    }
    for (std::size_t col = 0; col < surface.cols(); ++col) {
      CHECK(surface.mean_at(row, col) == recomputed[col].mean());
      CHECK(surface.stddev_at(row, col) == recomputed[col].stddev());
      CHECK(surface.exclusions[surface.cell(row, col)] == 0);
      // The mean of the replication estimates lies inside their range.
      CHECK(surface.mean_at(row, col) >= low[col]);
      CHECK(surface.mean_at(row, col) <= high[col]);
    }
  }
}

TEST_CASE("simulate: well-separated rows order correctly at every k") {
  const GridSurface surface = simulate_grid(small_spec(), {}, 2);
  for (std::size_t col = 0; col < surface.cols(); ++col) {
    CHECK(surface.mean_at(0, col) < surface.mean_at(1, col));
    CHECK(surface.mean_at(1, col) < surface.mean_at(2, col));
  }
}

TEST_CASE("simulate: progress reporting reaches the final row") {
  std::vector<std::pair<std::size_t, std::size_t>> events;
  simulate_grid(small_spec(),
                [&](std::size_t done, std::size_t total) {
                  events.emplace_back(done, total);
                },
                2);
  REQUIRE(!events.empty());
  CHECK(events.back().first == 3);
  CHECK(events.back().second == 3);
}

TEST_CASE("simulate: doubling replications moves cells within sampling noise") {
  GridSpec spec = small_spec();
  spec.replications = 60;
  const GridSurface base = simulate_grid(spec, {}, 2);
  spec.replications = 120;
  const GridSurface doubled = simulate_grid(spec, {}, 2);

  std::size_t within = 0;
  const std::size_t cells = base.mean_curve.size();
  for (std::size_t i = 0; i < cells; ++i) {
    const double se = base.stddev_curve[i] / std::sqrt(60.0);
    if (std::fabs(base.mean_curve[i] - doubled.mean_curve[i]) <= 5.0 * se) {
      ++within;
    }
  }
  CHECK(static_cast<double>(within) >= 0.99 * static_cast<double>(cells));
}

TEST_CASE("simulate: every replication failing is a degenerate grid") {
  GridSpec spec;
  spec.n = 50;
  spec.alpha0_values = {1.5};
  spec.replications = 5;
  spec.tail_mode = TailMode::Upper;
  // Location far below zero: no draw is ever positive.
  spec.delta = -1e12;
  spec.gamma = 1e-3;
  CHECK_THROWS_AS(simulate_grid(spec, {}, 1), Error);
  try {
    simulate_grid(spec, {}, 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridDegenerate);
  }
}

TEST_CASE("save/load: bit-exact round trip") {
  const GridSurface surface = simulate_grid(small_spec(), {}, 2);
  const auto path = temp_file("mctail_grid_roundtrip.mctail");
  save_grid(surface, path);
  const GridSurface loaded = load_grid(path);

  CHECK(loaded.spec.n == surface.spec.n);
  CHECK(loaded.spec.master_seed == surface.spec.master_seed);
  CHECK(loaded.spec.replications == surface.spec.replications);
  CHECK(loaded.spec.alpha0_values == surface.spec.alpha0_values);
  CHECK(loaded.spec.beta == surface.spec.beta);
  CHECK(loaded.spec.gamma == surface.spec.gamma);
  CHECK(loaded.spec.delta == surface.spec.delta);
  CHECK(loaded.spec.tail_mode == surface.spec.tail_mode);
  CHECK(loaded.kgrid.k_values() == surface.kgrid.k_values());
  CHECK(loaded.mean_curve == surface.mean_curve);
  CHECK(loaded.stddev_curve == surface.stddev_curve);
  CHECK(loaded.exclusions == surface.exclusions);

  // Saving the loaded surface reproduces the file byte for byte.
  const auto path2 = temp_file("mctail_grid_roundtrip2.mctail");
  save_grid(loaded, path2);
  CHECK(read_bytes(path) == read_bytes(path2));

  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("load: corruption taxonomy") {
  const GridSurface surface = simulate_grid(small_spec(), {}, 2);
  const auto path = temp_file("mctail_grid_corrupt.mctail");
  save_grid(surface, path);
  const std::string good = read_bytes(path);

  SUBCASE("edited version field") {
    std::string bad = good;
    bad.replace(bad.find("mctail-grid-v1"), 14, "mctail-grid-v9");
    write_bytes(path, bad);
    CHECK(load_error(path) == ErrorCode::FormatVersionMismatch);
  }

  SUBCASE("truncated file") {
    write_bytes(path, good.substr(0, good.size() / 2));
    CHECK(load_error(path) == ErrorCode::ChecksumMismatch);
  }

  SUBCASE("flipped matrix byte") {
    std::string bad = good;
    const std::size_t pos = bad.find("matrix=mean") + 20;
    bad[pos] = (bad[pos] == '5') ? '6' : '5';
    write_bytes(path, bad);
    CHECK(load_error(path) == ErrorCode::ChecksumMismatch);
  }

  SUBCASE("inconsistent header with a forged checksum") {
    // A syntactically valid file whose alpha0 count disagrees with the
    // value list must be rejected as structurally incompatible.
    std::string bad = good.substr(0, good.rfind("checksum="));
    bad.replace(bad.find("alpha0_count=3"), 14, "alpha0_count=2");
    char forged[32];
    std::snprintf(forged, sizeof(forged), "checksum=%016llx",
                  static_cast<unsigned long long>(fnv1a64(bad)));
    write_bytes(path, bad + forged + "\n");
    CHECK(load_error(path) == ErrorCode::SpecIncompatible);
  }

  std::filesystem::remove(path);
}

TEST_CASE("simulate: the Gaussian row stays above 2 near the 20% truncation") {
  GridSpec spec;
  spec.n = 10000;
  spec.alpha0_values = {2.0};
  spec.replications = 60;
  spec.master_seed = 7;
  const GridSurface surface = simulate_grid(spec, {}, 2);
  const auto& ks = surface.kgrid.k_values();
  for (std::size_t col = 0; col < surface.cols(); ++col) {
    if (ks[col] >= 1800) {  // k in [18%, 20%] of n
      CHECK(surface.mean_at(0, col) > 2.0);
    }
  }
}
