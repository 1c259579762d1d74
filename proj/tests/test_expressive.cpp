#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "specslice/error.hpp"
#include "specslice/expressive.hpp"
#include "specslice/generators.hpp"
#include "specslice/slicer.hpp"
#include "test_support.hpp"

using namespace specslice;
namespace ts = testsupport;

namespace {

ImageSignal random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  Matrix m = ts::random_matrix(w * h, 1, seed);
  return {w, h, m.col(0)};
}

// Direct O(N^2) 2-D DFT filtering.
Vector dft_filter(const ImageSignal& img, const std::function<double(double)>& phi) {
  const auto w = static_cast<long>(img.width), h = static_cast<long>(img.height);
  using C = std::complex<double>;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<C> coeff(img.size());
  for (long k1 = 0; k1 < h; ++k1)
    for (long k2 = 0; k2 < w; ++k2) {
      C acc = 0;
      for (long r = 0; r < h; ++r)
        for (long c = 0; c < w; ++c)
          acc += img.values(r * w + c) * std::polar(1.0, -two_pi * (double(k1 * r) / h + double(k2 * c) / w));
      long f1 = k1 <= h / 2 ? k1 : k1 - h, f2 = k2 <= w / 2 ? k2 : k2 - w;
      double rho1 = std::abs(double(f1)) / (double(h) / 2), rho2 = std::abs(double(f2)) / (double(w) / 2);
      coeff[k1 * w + k2] = acc * phi(rho1 * rho1 + rho2 * rho2);
    }
  Vector out(img.size());
  for (long r = 0; r < h; ++r)
    for (long c = 0; c < w; ++c) {
      C acc = 0;
      for (long k1 = 0; k1 < h; ++k1)
        for (long k2 = 0; k2 < w; ++k2)
          acc += coeff[k1 * w + k2] * std::polar(1.0, two_pi * (double(k1 * r) / h + double(k2 * c) / w));
      out(r * w + c) = acc.real() / double(w * h);
    }
  return out;
}

Matrix slicer_dictionary(const ImageSignal& img) {
  Graph grid = generate_grid(img.width, img.height).with_features(Matrix(img.values));
  RandomSignals none{Matrix(static_cast<Eigen::Index>(img.size()), 0), 0, 0};
  return build_dictionary(grid, default_bank(), none, 1).gamma;
}

}  // namespace

TEST_CASE("filter shapes") {
  CHECK(FrequencyFilter{FilterKind::low}(0.0) == 1.0);
  CHECK(FrequencyFilter{FilterKind::band}(0.5) == 1.0);
  CHECK(FrequencyFilter{FilterKind::high}(0.0) == 0.0);
  CHECK(FrequencyFilter{FilterKind::low}(0.3) == std::exp(-100 * 0.09));
  CHECK(FrequencyFilter{FilterKind::band}(0.2) == std::exp(-1000 * 0.09));
  CHECK(FrequencyFilter{FilterKind::high}(1.0) == 1 - std::exp(-10.0));
  for (FilterKind k : {FilterKind::low, FilterKind::band, FilterKind::high})
    CHECK(parse_filter(filter_name(k)) == k);
  CHECK_THROWS_AS(parse_filter("notch"), Error);
}

TEST_CASE("identity and constant images") {
  ImageSignal img = random_image(9, 6, 1);
  ImageSignal same = make_target(img, [](double) { return 1.0; });
  CHECK((same.values - img.values).cwiseAbs().maxCoeff() < 1e-8);

  ImageSignal flat{8, 8, Vector::Constant(64, 0.37)};
  CHECK(make_target(flat, FrequencyFilter{FilterKind::high}).values.cwiseAbs().maxCoeff() < 1e-8);
  CHECK((make_target(flat, FrequencyFilter{FilterKind::low}).values - flat.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("filtering matches a direct DFT") {
  for (auto [w, h] : {std::pair<std::size_t, std::size_t>{8, 8}, {7, 10}, {12, 5}}) {
    ImageSignal img = random_image(w, h, w * h);
    for (FilterKind k : {FilterKind::low, FilterKind::band, FilterKind::high}) {
      FrequencyFilter f{k};
      Vector expect = dft_filter(img, f);
      CHECK((make_target(img, f).values - expect).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("filtering is linear") {
  ImageSignal x = random_image(16, 12, 2), y = random_image(16, 12, 3);
  ImageSignal mix{16, 12, 0.7 * x.values - 2.5 * y.values};
  for (FilterKind k : {FilterKind::low, FilterKind::band, FilterKind::high}) {
    FrequencyFilter f{k};
    Vector lhs = make_target(mix, f).values;
    Vector rhs = 0.7 * make_target(x, f).values - 2.5 * make_target(y, f).values;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("synthetic image") {
  ImageSignal a = synthetic_image(32, 32, 0);
  CHECK(a.size() == 1024);
  CHECK(a.values.minCoeff() == 0.0);
  CHECK(a.values.maxCoeff() == 1.0);
  CHECK(synthetic_image(32, 32, 0).values == a.values);
  CHECK_FALSE(synthetic_image(32, 32, 1).values == a.values);
  CHECK(synthetic_image(20, 12, 0).size() == 240);
}

TEST_CASE("PGM round-trip") {
  auto dir = ts::temp_dir("expressive_pgm");
  ImageSignal img = synthetic_image(13, 7, 2);
  save_pgm(dir / "a.pgm", img);
  ImageSignal back = load_pgm(dir / "a.pgm");
  CHECK(back.width == 13);
  CHECK(back.height == 7);
  CHECK((back.values - img.values).cwiseAbs().maxCoeff() <= 0.5 / 255 + 1e-12);

  ts::write_file(dir / "ascii.pgm", "P2\n# c\n3 2\n10\n0 5 10\n10 5 0\n");
  ImageSignal ascii = load_pgm(dir / "ascii.pgm");
  CHECK(ascii.values(1) == 0.5);
  CHECK(ascii.values(3) == 1.0);
  ts::write_file(dir / "bad.pgm", "P6\n1 1\n255\nabc");
  CHECK_THROWS_AS(load_pgm(dir / "bad.pgm"), Error);
}

TEST_CASE("baseline features") {
  ImageSignal img = synthetic_image(5, 4, 0);
  Matrix f = baseline_features(img);
  CHECK(f.rows() == 20);
  CHECK(f.cols() == 3);
  CHECK(f(7, 0) == img.values(7));
  CHECK(f(7, 1) == doctest::Approx(2.0 / 5.0));
  CHECK(f(7, 2) == doctest::Approx(1.0 / 4.0));
}

TEST_CASE("realizable and zero targets") {
  ImageSignal img = synthetic_image(16, 16, 0);
  Matrix gamma = slicer_dictionary(img);
  CHECK(gamma.cols() == 20);

  Vector column = gamma.col(5);
  auto fit = regress(gamma, column);
  CHECK(fit.sse < 1e-6);

  auto zero = regress(gamma, Vector::Zero(256));
  CHECK(zero.history.front() == 0.0);
  CHECK(zero.sse == 0.0);
  auto zero_base = baseline_regress(img, ImageSignal{16, 16, Vector::Zero(256)});
  CHECK(zero_base.sse == 0.0);

  Matrix coords = baseline_features(img);
  ImageSignal plane{16, 16, 0.3 + 0.8 * coords.col(1).array() - 0.5 * coords.col(2).array()};
  auto lin = baseline_regress(img, plane);
  CHECK(lin.sse < 1e-6);

  CHECK_THROWS_AS(regress(gamma, Vector::Zero(10)), Error);
}

TEST_CASE("slicer dictionary beats the raw-feature baseline on a band-pass target") {
  ImageSignal img = synthetic_image(32, 32, 0);
  Matrix gamma = slicer_dictionary(img);
  ImageSignal target = make_target(img, FrequencyFilter{FilterKind::band});
  Graph grid = generate_grid(32, 32);
  double slicer = regress(grid, gamma, target).sse;
  double base = baseline_regress(img, target).sse;
  CHECK(slicer < 0.2 * base);
}
