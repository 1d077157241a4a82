#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "nlslab/error.hpp"
#include "nlslab/field_io.hpp"
#include "nlslab/harness.hpp"
#include "support.hpp"

using namespace nlslab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("nlslab-io-" + make_run_id());
  TempDir() { fs::create_directories(path); }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::size_t parse_error_line(const fs::path& p) {
  try {
    load_field(p);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("field_io") {

TEST_CASE("doubles round-trip bit for bit") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), expo(rng));
    REQUIRE(parse_double(format_double(v), "x", 1) == v);
  }
  CHECK(parse_double("+1.5", "x", 1) == 1.5);
  CHECK_THROWS_AS(parse_double("1.5x", "x", 1), ParseError);
  CHECK_THROWS_AS(parse_double("", "x", 1), ParseError);
}

TEST_CASE("field files round-trip exactly") {
  TempDir dir;
  std::mt19937_64 rng(2);
  auto g = make_grid(3, 25.0, 333);
  const auto u = support::random_smooth_field(g, rng);
  save_field(u, dir.path / "u.txt");
  const auto v = load_field(dir.path / "u.txt");
  REQUIRE(v.size() == u.size());
  CHECK(v.grid().dimension() == 3);
  CHECK(v.grid().r_max() == 25.0);
  for (std::size_t i = 0; i < u.size(); ++i) REQUIRE(v[i] == u[i]);
}

TEST_CASE("malformed field files name the offending line") {
  TempDir dir;
  const auto p = dir.path / "bad.txt";
  write_text(p, "");
  CHECK(parse_error_line(p) == 1);
  write_text(p, "# something else\n");
  CHECK(parse_error_line(p) == 1);
  write_text(p, "# nlslab-field N=3 rmax=1 nodes=3\n0 1 0\n0.5 1\n1 0 0\n");
  CHECK(parse_error_line(p) == 3);
  write_text(p, "# nlslab-field N=3 rmax=1 nodes=3\n0 1 0\n0.5 abc 0\n1 0 0\n");
  CHECK(parse_error_line(p) == 3);
  write_text(p, "# nlslab-field N=3 rmax=1 nodes=3\n0 1 0\n\n# comment\n0.6 1 0\n1 0 0\n");
  CHECK(parse_error_line(p) == 5);
  write_text(p, "# nlslab-field N=3 rmax=1 nodes=3\n0 1 0\n0.5 1 0\n");
  CHECK(parse_error_line(p) == 3);
  write_text(p, "# nlslab-field N=3 rmax=1 nodes=3\n0 1 0\n0.5 1 0\n1 0 0\n1.5 0 0\n");
  CHECK(parse_error_line(p) == 5);
  write_text(p, "# nlslab-field N=x rmax=1 nodes=3\n");
  CHECK(parse_error_line(p) == 1);
  // Blank lines and comments are tolerated.
  write_text(p, "# nlslab-field N=1 rmax=1 nodes=3\n0 1 0\n\n# c\n0.5 1 -2\n1 0 0\n");
  const auto f = load_field(p);
  CHECK(f[1] == cplx(1.0, -2.0));
  CHECK_THROWS_AS(load_field(dir.path / "missing.txt"), Error);
}

TEST_CASE("sample tables round-trip") {
  TempDir dir;
  std::vector<Sample> rows(5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& s = rows[i];
    s.t = 0.1 * i;
    s.mass = 1.0 / 3.0 + i;
    s.energy = -std::sqrt(2.0) * i;
    s.grad_sq = std::exp(static_cast<double>(i));
    s.l4_pow = 1e-300;
    s.lp1_pow = 7.0;
    s.product_grad = M_PI;
    s.virial_rhs = -1e10;
    s.local_variance = 2.5;
    s.local_virial_rhs = 0.0;
    s.strichartz_accum = 1e-17;
    s.dt = 1e-3;
    s.nodes = 4097 + i;
    s.max_amplitude = 4.3;
  }
  write_samples_csv(rows, dir.path / "t.csv");
  const auto back = read_samples_csv(dir.path / "t.csv");
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) REQUIRE(sample_row(back[i]) == sample_row(rows[i]));

  write_series(rows, dir.path / "series");
  for (std::size_t c = 1; c < sample_columns().size(); ++c) CHECK(fs::exists(dir.path / "series" / (sample_columns()[c] + ".dat")));

  write_text(dir.path / "bad.csv", "t,mass\n1,2\n");
  CHECK_THROWS_AS(read_samples_csv(dir.path / "bad.csv"), ParseError);
}

}
