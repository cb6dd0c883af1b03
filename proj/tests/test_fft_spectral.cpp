#include <complex>

#include "doctest.h"
#include "fepinn/fft.hpp"
#include "fepinn/rng.hpp"
#include "fepinn/spectral.hpp"
#include "support/oracles.hpp"

using namespace fepinn;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

TEST_CASE("delta and constant transforms") {
  std::vector<double> re{1.0, 0.0, 0.0, 0.0}, im(4, 0.0);
  dft_inplace(re, im, -1);
  for (int i = 0; i < 4; ++i) {
    CHECK(re[i] == doctest::Approx(1.0));
    CHECK(im[i] == doctest::Approx(0.0));
  }
  re = {1.0, 1.0, 1.0, 1.0};
  im = {0.0, 0.0, 0.0, 0.0};
  dft_inplace(re, im, -1);
  CHECK(re[0] == doctest::Approx(4.0));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(std::complex<double>(re[i], im[i])) < 1e-12);
}

TEST_CASE("matches the dense oracle on awkward and power-of-two lengths") {
  Rng rng(2);
  for (std::size_t n : {4u, 97u, 151u, 256u, 301u, 1024u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    auto want = oracle::naive_dft(x);
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] = x[i].real();
      im[i] = x[i].imag();
    }
    dft_inplace(re, im, -1);
    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      max_err = std::max(max_err,
                         std::abs(std::complex<double>(re[i], im[i]) - want[i]));
    CHECK(max_err <= 1e-9);  // the acceptance gate pins 1e-10 on real inputs
  }
}

TEST_CASE("round trip and Parseval") {
  Rng rng(9);
  for (std::size_t n : {8u, 97u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    std::vector<double> re(n), im(n, 0.0);
    std::copy(x.begin(), x.end(), re.begin());
    dft_inplace(re, im, -1);
    double norm_x = 0.0, norm_hat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      norm_x += x[i] * x[i];
      norm_hat += re[i] * re[i] + im[i] * im[i];
    }
    CHECK(std::abs(norm_x - norm_hat / double(n)) <= 1e-10 * norm_x);
    idft_inplace(re, im);
    for (std::size_t i = 0; i < n; ++i) CHECK(re[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("spectral differentiation identity") {
  // f(x) = e^{2 pi i k x} on N >= 2k+2 points: multiply the spectrum by
  // 2 pi i xi and synthesize to get f'
  const std::size_t n = 32;
  const int k = 5;
  const double period = 2.0;
  std::vector<double> re(n), im(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = period * double(j) / double(n);
    re[j] = std::cos(2.0 * kPi * k * x / period);
    im[j] = std::sin(2.0 * kPi * k * x / period);
  }
  std::vector<double> fr = re, fi = im;
  dft_inplace(fr, fi, -1);
  for (std::size_t j = 0; j < n; ++j) {
    const double xi = double(signed_mode(j, n)) / period;
    const double a = fr[j], b = fi[j];
    fr[j] = -2.0 * kPi * xi * b;
    fi[j] = 2.0 * kPi * xi * a;
  }
  idft_inplace(fr, fi);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = period * double(j) / double(n);
    const double want_re = -2.0 * kPi * k / period * std::sin(2.0 * kPi * k * x / period);
    const double want_im = 2.0 * kPi * k / period * std::cos(2.0 * kPi * k * x / period);
    CHECK(std::abs(fr[j] - want_re) <= 1e-8);
    CHECK(std::abs(fi[j] - want_im) <= 1e-8);
  }
}

TEST_CASE("symbol evaluation") {
  SpectralSymbol d1{{SymbolTerm::signed_power({1.0, 0.0}, 1)}};
  CHECK(std::abs(symbol_eval_at(d1, std::vector<double>{0.0})) == 0.0);

  // P(xi) = 1 + (2 pi i xi)^2 at xi = 1 equals 1 - 4 pi^2
  SpectralSymbol p;
  p.terms.push_back(SymbolTerm::signed_power({1.0, 0.0}, 0));
  p.terms.push_back(SymbolTerm::signed_power({1.0, 0.0}, 2));
  auto v = symbol_eval_at(p, std::vector<double>{1.0});
  CHECK(v.real() == doctest::Approx(1.0 - 4.0 * kPi * kPi).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(0.0));

  // fractional |2 pi xi|^(1/2) at xi = 4 equals sqrt(8 pi)
  SpectralSymbol frac{{SymbolTerm::radial_power({1.0, 0.0}, 0.5)}};
  auto f = symbol_eval_at(frac, std::vector<double>{4.0});
  CHECK(f.real() == doctest::Approx(std::sqrt(8.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("weight_build normalization, cutoff, homogeneity") {
  WavenumberGrid grid = WavenumberGrid::regular({5}, {1.0});  // xi in {0,1,2,-2,-1}
  SpectralSymbol d1{{SymbolTerm::signed_power({1.0, 0.0}, 1)}};

  SUBCASE("L-inf normalization puts |W| = 1 at the largest retained mode") {
    auto w = weight_build(d1, grid, std::nullopt, WeightNorm::Linf);
    // max |P| = 4 pi at xi = +-2, so W(2) = i
    CHECK(w.w[2].real() == doctest::Approx(0.0));
    CHECK(w.w[2].imag() == doctest::Approx(1.0).epsilon(1e-9));
    double max_abs = 0.0;
    for (auto& v : w.w) max_abs = std::max(max_abs, std::abs(v));
    CHECK(std::abs(max_abs - 1.0) <= 1e-10);
  }

  SUBCASE("cutoff zeroes the tail and renormalizes") {
    auto w = weight_build(d1, grid, 1.0, WeightNorm::Linf);
    CHECK(std::abs(w.w[2]) == 0.0);  // xi = 2 dropped
    CHECK(std::abs(w.w[3]) == 0.0);  // xi = -2 dropped
    CHECK(std::abs(std::abs(w.w[1]) - 1.0) <= 1e-10);
  }

  SUBCASE("all-zero retained weight is an error") {
    CHECK_THROWS_AS(weight_build(d1, grid, 0.5, WeightNorm::Linf), std::invalid_argument);
  }

  SUBCASE("positive scaling of the symbol leaves W unchanged") {
    Rng rng(12);
    SpectralSymbol s;
    s.terms.push_back(SymbolTerm::signed_power({rng.normal(), rng.normal()}, 1));
    s.terms.push_back(SymbolTerm::signed_power({rng.normal(), rng.normal()}, 2));
    auto w1 = weight_build(s, grid, std::nullopt, WeightNorm::Linf);
    SpectralSymbol sc = s;
    for (auto& term : sc.terms) term.coeff *= 37.5;
    auto w2 = weight_build(sc, grid, std::nullopt, WeightNorm::Linf);
    for (std::size_t i = 0; i < w1.w.size(); ++i)
      CHECK(std::abs(w1.w[i] - w2.w[i]) <= 1e-12);
  }

  SUBCASE("random symbols keep max retained |W| = 1") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      SpectralSymbol s;
      const int nterms = 1 + int(rng.uniform_int(0, 2));
      for (int i = 0; i < nterms; ++i)
        s.terms.push_back(
            SymbolTerm::signed_power({rng.normal(), rng.normal()}, int(rng.uniform_int(0, 3))));
      auto grid2 = WavenumberGrid::regular({std::size_t(rng.uniform_int(4, 32))}, {2.0});
      auto w = weight_build(s, grid2, std::nullopt, WeightNorm::Linf);
      double max_abs = 0.0;
      for (auto& v : w.w) max_abs = std::max(max_abs, std::abs(v));
      CHECK(std::abs(max_abs - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("sample_grid_size") {
  Rng rng(4);
  CHECK(sample_grid_size(8, 8, rng) == 8);

  // 10^4 draws from {151..301}: all in range, mean within 3 sigma of 226
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    auto v = sample_grid_size(151, 301, rng);
    REQUIRE(v >= 151);
    REQUIRE(v <= 301);
    sum += double(v);
  }
  const double mean = sum / draws;
  const double sigma = (301.0 - 151.0 + 1.0) / std::sqrt(12.0) / std::sqrt(double(draws));
  CHECK(std::abs(mean - 226.0) <= 3.0 * sigma);

  // fixed seed reproduces the same draw sequence
  Rng a(99), b(99);
  for (int i = 0; i < 32; ++i) CHECK(sample_grid_size(151, 301, a) == sample_grid_size(151, 301, b));

  CHECK_THROWS_AS(sample_grid_size(10, 9, rng), std::invalid_argument);
}

TEST_CASE("mc_project basics") {
  SUBCASE("one sample, one mode") {
    const double x0 = 0.37, xi = 3.0, vol = 2.0, f = 1.7;
    Tensor pts({1, 1}, {x0});
    auto proj = std::make_shared<McProjection>(std::vector<std::vector<double>>{{xi}}, pts,
                                               vol, vol / 1.0);
    Tape t;
    Var s = t.leaf(Tensor({1}, {f}));
    ComplexVar out = mc_project(t, proj, s);
    const double ang = -2.0 * kPi * xi * x0;
    CHECK(t.value(out.re)[0] == doctest::Approx(vol * f * std::cos(ang)).epsilon(1e-12));
    CHECK(t.value(out.im)[0] == doctest::Approx(vol * f * std::sin(ang)).epsilon(1e-12));
  }

  SUBCASE("grid coincidence with the row DFT") {
    const std::size_t n = 24;
    const double period = 2.0, x0 = -1.0;
    Tensor pts({n, 1});
    Tensor field({n});
    Rng rng(21);
    for (std::size_t j = 0; j < n; ++j) {
      pts.at2(j, 0) = x0 + period * double(j) / double(n);
      field[j] = rng.normal();
    }
    std::vector<std::vector<double>> modes;
    for (std::size_t k = 0; k < n; ++k)
      modes.push_back({double(signed_mode(k, n)) / period});
    auto proj =
        std::make_shared<McProjection>(modes, pts, period, period / double(n));
    Tape t;
    ComplexVar mc = mc_project(t, proj, t.leaf(field));
    ComplexVar gr = dft_forward(t, t.leaf(field), 1, n);

    // the projection kernel carries the physical phase e^{-2 pi i xi x_j}
    // while the DFT indexes samples; for x0 != 0 they differ per mode by
    // e^{-2 pi i xi x0}
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = modes[k][0];
      const std::complex<double> phase = std::polar(1.0, -2.0 * kPi * xi * x0);
      const std::complex<double> want =
          std::complex<double>(t.value(gr.re)[k], t.value(gr.im)[k]) * phase * (period / double(n));
      const std::complex<double> got(t.value(mc.re)[k], t.value(mc.im)[k]);
      CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
  }

  SUBCASE("Monte-Carlo mean of a constant concentrates like 1/sqrt(N)") {
    const std::size_t n = 4096;
    const double c = 1.0, vol = 1.0;
    int ok = 0;
    const int trials = 40;
    for (int trial = 0; trial < trials; ++trial) {
      Rng rng(1000 + trial);
      Tensor pts({n, 1});
      Tensor f({n}, c);
      for (std::size_t j = 0; j < n; ++j) pts.at2(j, 0) = rng.uniform();
      McProjection proj({{3.0}}, pts, vol, vol / double(n));
      std::vector<double> re(1), im(1), zr(n, c), zi(n, 0.0);
      proj.apply(zr, zi, re, im);
      const double mag = std::hypot(re[0], im[0]);
      if (mag <= 3.0 * vol * c / std::sqrt(double(n))) ++ok;
    }
    CHECK(ok >= int(0.95 * trials));
  }
}
