#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "yseg/grid_io.hpp"
#include "yseg/rng.hpp"
#include "yseg/scene.hpp"
#include "yseg/softmax.hpp"

using namespace yseg;
namespace fs = std::filesystem;

TEST_SUITE("grid") {

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(GridShape({5}), std::invalid_argument);
  CHECK_THROWS_AS(GridShape({2, 2, 2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(GridShape({3, 0}), std::invalid_argument);
  const GridShape s{2, 3, 4};
  CHECK(s.size() == 24);
  CHECK(s.index3(1, 2, 3) == 23);
  CHECK(s.coords3(23) == std::array<std::size_t, 3>{1, 2, 3});
  CHECK(GridShape({3, 4}).extents3() == std::array<std::size_t, 3>{1, 3, 4});
}

TEST_CASE("softmax values") {
  LogitField t(GridShape{1, 2}, 3, std::vector<double>{1, 2, 3, 0, 0, 0});
  const auto z = softmax(t);
  CHECK(z.at(0, 0) == doctest::Approx(0.09003057).epsilon(1e-7));
  CHECK(z.at(0, 1) == doctest::Approx(0.24472847).epsilon(1e-7));
  CHECK(z.at(0, 2) == doctest::Approx(0.66524096).epsilon(1e-7));
  for (int c = 0; c < 3; ++c) CHECK(z.at(1, c) == doctest::Approx(1.0 / 3));
}

TEST_CASE("softmax is shift invariant and normalised") {
  Rng rng(3);
  LogitField t(GridShape{4, 4}, 4);
  for (auto& v : t.values()) v = 5 * rng.normal();
  LogitField shifted = t;
  for (std::size_t e = 0; e < t.elements(); ++e)
    for (std::size_t c = 0; c < 4; ++c) shifted.at(e, c) += 100.0 * static_cast<double>(e);
  const auto a = softmax(t), b = softmax(shifted);
  for (std::size_t e = 0; e < t.elements(); ++e) {
    double sum = 0;
    for (std::size_t c = 0; c < 4; ++c) {
      sum += a.at(e, c);
      CHECK(std::abs(a.at(e, c) - b.at(e, c)) < 1e-12);
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  t.at(3, 1) = std::nan("");
  CHECK_THROWS_AS(softmax(t), DataError);
}

TEST_CASE("one-hot and argmax") {
  SemanticLabelMap h(GridShape{1, 2}, 1, std::vector<std::uint8_t>{0, 3});
  const auto y = one_hot(h, 4);
  CHECK(y.values()[0] == 1.0);
  CHECK(y.values()[7] == 1.0);
  CHECK(argmax(y) == h);
  CHECK_THROWS_AS(one_hot(h, 3), DataError);

  SemanticLabelMap zero(GridShape{2, 2}, 1, 0);
  const auto y0 = one_hot(zero, 4);
  for (std::size_t e = 0; e < 4; ++e) CHECK(y0.at(e, 0) == 1.0);

  ProbabilityField tie(GridShape{1, 1}, 4, std::vector<double>{0.5, 0.5, 0, 0});
  CHECK(argmax(tie)[0] == 0);

  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    SemanticLabelMap r(GridShape{3, 5}, 1);
    for (std::size_t e = 0; e < r.elements(); ++e) r[e] = static_cast<std::uint8_t>(rng.uniform_int(0, 3));
    CHECK(argmax(one_hot(r, 4)) == r);
  }
}

TEST_CASE("two-squares-notch counts") {
  SceneSpec s;
  s.dims = {10, 20};
  const auto g = generate_scene(s);
  std::size_t labelled = 0, contacts = 0;
  for (std::size_t y = 0; y < 10; ++y)
    for (std::size_t x = 0; x < 20; ++x) {
      labelled += g[y * 20 + x] != 0;
      if (x + 1 < 20 && g[y * 20 + x] == 1 && g[y * 20 + x + 1] == 2) ++contacts;
    }
  CHECK(labelled == 2 * 64 - 4);
  CHECK(contacts == 4);
  CHECK(max_label(g) == 2);
  CHECK(generate_scene(s) == g);

  s.dims = {6, 20};
  CHECK_THROWS(generate_scene(s));
}

TEST_CASE("random blobs") {
  SceneSpec s;
  s.kind = SceneKind::random_blobs;
  s.dims = {40, 40};
  s.blob_count = 3;
  s.seed = 12;
  s.min_separation = 2;
  const auto g = generate_scene(s);
  std::set<std::uint32_t> labels;
  for (auto v : g.values())
    if (v) labels.insert(v);
  CHECK(labels == std::set<std::uint32_t>{1, 2, 3});
  // No two different labels within Chebyshev distance 2.
  for (std::size_t a = 0; a < g.elements(); ++a)
    for (std::size_t b = 0; b < g.elements(); ++b) {
      if (!g[a] || !g[b] || g[a] == g[b]) continue;
      const auto ca = g.shape().coords3(a), cb = g.shape().coords3(b);
      const auto dy = ca[1] > cb[1] ? ca[1] - cb[1] : cb[1] - ca[1];
      const auto dx = ca[2] > cb[2] ? ca[2] - cb[2] : cb[2] - ca[2];
      REQUIRE(std::max(dy, dx) > 2);
    }
  CHECK(generate_scene(s) == g);
}

TEST_CASE("grid file round trips") {
  const auto dir = fs::temp_directory_path() / "yseg_grid_io";
  fs::create_directories(dir);

  InstanceLabelMap g(GridShape{5, 5}, 1);
  for (std::size_t e = 0; e < 25; ++e) g[e] = static_cast<std::uint32_t>(e * 7 % 11);
  write_grid(g, dir / "g.grd");
  CHECK(read_instance_map(dir / "g.grd") == g);
  write_grid(g, dir / "g.pgm");
  CHECK(read_instance_map(dir / "g.pgm") == g);

  Rng rng(1);
  ProbabilityField z(GridShape{4, 4, 4}, 3);
  for (std::size_t e = 0; e < z.elements(); ++e) {
    const float a = static_cast<float>(rng.uniform() * 0.5);
    z.at(e, 0) = a;
    z.at(e, 1) = 0.25f;
    z.at(e, 2) = 0.75f - a;
  }
  write_grid(z, dir / "z.grd");
  const auto back = read_probability_field(dir / "z.grd");
  double diff = 0;
  for (std::size_t i = 0; i < z.values().size(); ++i) diff = std::max(diff, std::abs(z.values()[i] - back.values()[i]));
  CHECK(diff == 0.0);

  {
    std::ofstream f(dir / "six.grd", std::ios::binary);
    f << R"({"magic":"GRD1","dims":[1,1,1,1,1,1],"channels":1,"dtype":"u16","order":"C"})" << "\n" << "ab";
  }
  try {
    read_raw(dir / "six.grd");
    FAIL("six dims accepted");
  } catch (const GridIoError& e) {
    CHECK(e.kind() == IoErrorKind::dim_mismatch);
  }

  {
    std::ofstream f(dir / "short.grd", std::ios::binary);
    f << R"({"magic":"GRD1","dims":[2,2],"channels":1,"dtype":"u16","order":"C"})" << "\n" << "abc";
  }
  try {
    read_raw(dir / "short.grd");
    FAIL("truncated payload accepted");
  } catch (const GridIoError& e) {
    CHECK(e.kind() == IoErrorKind::truncated_payload);
  }

  {
    std::ofstream f(dir / "bad.grd", std::ios::binary);
    f << "{\"magic\":\"GRD1\",\"dims\":\n";
  }
  try {
    read_raw(dir / "bad.grd");
    FAIL("malformed header accepted");
  } catch (const GridIoError& e) {
    CHECK(e.kind() == IoErrorKind::malformed_header);
  }
  fs::remove_all(dir);
}

}
