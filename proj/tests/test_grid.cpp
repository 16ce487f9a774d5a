#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "vortlab/error.hpp"
#include "vortlab/grid.hpp"

using namespace vortlab;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::StageFailure;  // sentinel: nothing thrown
}

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("grid spec validation and indexing") {
  GridSpec s;
  s.n = 8;
  CHECK_NOTHROW(s.validate());
  CHECK(s.size() == 512);
  CHECK(s.modes() == 8 * 8 * 5);
  CHECK(s.index(1, 2, 3) == 1 + 8 * (2 + 8 * 3));
  const Vec3 p = s.point(2, 0, 4);
  CHECK(p[0] == doctest::Approx(-std::numbers::pi + 2 * s.h()));
  CHECK(p[2] == doctest::Approx(0.0));

  GridSpec odd;
  odd.n = 7;
  CHECK(code_of([&] { odd.validate(); }) == ErrorCode::InvalidArgument);
  GridSpec neg;
  neg.L = -1;
  CHECK(code_of([&] { neg.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("norms of a constant field match closed forms") {
  GridSpec s;
  s.n = 8;
  GridField f = sample_field(s, 3, [](const Vec3&, double* o) {
    o[0] = 1;
    o[1] = 2;
    o[2] = 2;
  });
  const double vol = std::pow(2 * std::numbers::pi, 3);
  CHECK(l2_norm(f) == doctest::Approx(3.0 * std::sqrt(vol)));
  CHECK(max_norm(f) == doctest::Approx(3.0));
  CHECK(integral(magnitude(f)) == doctest::Approx(3.0 * vol));
  CHECK(inner(f, f) == doctest::Approx(9.0 * vol));
}

TEST_CASE("ball restricted norms count lattice cells") {
  GridSpec s;
  s.n = 16;
  GridField one = sample_field(s, 1, [](const Vec3&, double* o) { o[0] = 1; });
  long count = 0;
  for (int k = 0; k < s.n; ++k)
    for (int j = 0; j < s.n; ++j)
      for (int i = 0; i < s.n; ++i) {
        const Vec3 x = s.point(i, j, k);
        if (std::hypot(x[0], x[1], x[2]) < 1.3) ++count;
      }
  CHECK(power_integral_ball(one, 2.0, 1.3) == doctest::Approx(count * s.cell_volume()));
  CHECK(l2_norm_ball(one, 1.3) == doctest::Approx(std::sqrt(count * s.cell_volume())));
  CHECK(max_norm_ball(one, 1.3) == 1.0);
}

TEST_CASE("field arithmetic checks layouts") {
  GridSpec a, b;
  a.n = 8;
  b.n = 10;
  GridField fa(a, 3), fb(b, 3), fs(a, 1);
  CHECK(code_of([&] { (void)(fa + fb); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { (void)(fa - fs); }) == ErrorCode::ComponentMismatch);
  CHECK(code_of([] { GridField bad(GridSpec{}, 0); }) == ErrorCode::ComponentMismatch);

  fa.at(1, 5) = 2.0;
  fs.at(0, 5) = 3.0;
  const GridField m = multiply(fs, fa);
  CHECK(m.at(1, 5) == 6.0);
  CHECK(component(m, 1).at(0, 5) == 6.0);
  CHECK((2.0 * fa).at(1, 5) == 4.0);

  fa.at(0, 0) = std::nan("");
  CHECK(code_of([&] { fa.check_finite(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("VLF1 round trip and byte layout") {
  GridSpec s;
  s.n = 4;
  s.L = 3.0;
  s.origin = {0.5, -1.0, 2.0};
  GridField f = sample_field(s, 2, [](const Vec3& x, double* o) {
    o[0] = x[0] + 10 * x[1];
    o[1] = -x[2];
  }, 0.75);
  const std::string path = tmp_path("vortlab_test_grid.vlf1");
  write_vlf1(path, f);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 8 + 24 + 8 + 2 * 64 * 8);

  std::ifstream is(path, std::ios::binary);
  char magic[4];
  std::uint32_t n = 0, comps = 0;
  double L = 0, origin[3], t = 0, first = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&comps), 4);
  is.read(reinterpret_cast<char*>(&L), 8);
  is.read(reinterpret_cast<char*>(origin), 24);
  is.read(reinterpret_cast<char*>(&t), 8);
  is.read(reinterpret_cast<char*>(&first), 8);
  CHECK(std::memcmp(magic, "VLF1", 4) == 0);
  CHECK(n == 4);
  CHECK(comps == 2);
  CHECK(L == 3.0);
  CHECK(origin[1] == -1.0);
  CHECK(t == 0.75);
  CHECK(first == 0.5 + 10 * -1.0);

  const GridField g = read_vlf1(path);
  CHECK(g.spec == s);
  CHECK(g.components == 2);
  CHECK(g.time == 0.75);
  CHECK(g.data == f.data);

  std::ofstream(path, std::ios::binary) << "XLF1garbage";
  CHECK(code_of([&] { read_vlf1(path); }) == ErrorCode::Io);
  std::ofstream(path, std::ios::binary) << "VLF1";
  CHECK(code_of([&] { read_vlf1(path); }) == ErrorCode::Io);
  std::filesystem::remove(path);
  CHECK(code_of([&] { read_vlf1(path); }) == ErrorCode::Io);
}
