#include <cmath>
#include <complex>

#include "doctest.h"
#include "fepinn/fft.hpp"
#include "fepinn/pde.hpp"
#include "support/oracles.hpp"

using namespace fepinn;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

struct SpectralInputs {
  ComplexVar u_hat, ut_hat, nl_hat;
  Tensor xi;
};

// one time slice of samples pushed through dft_forward, plus an analytic
// time-derivative slice and the pointwise nonlinear field
SpectralInputs slice_inputs(Tape& t, const std::vector<double>& u,
                            const std::vector<double>& ut, const std::vector<double>& nl,
                            double period) {
  const std::size_t n = u.size();
  SpectralInputs s;
  s.u_hat = dft_forward(t, t.leaf(Tensor({n}, u)), 1, n);
  s.ut_hat = dft_forward(t, t.leaf(Tensor({n}, ut)), 1, n);
  s.nl_hat = dft_forward(t, t.leaf(Tensor({n}, nl)), 1, n);
  s.xi = Tensor({n});
  for (std::size_t k = 0; k < n; ++k) s.xi[k] = double(signed_mode(k, n)) / period;
  return s;
}

std::complex<double> at(const Tape& t, ComplexVar z, std::size_t k) {
  return {t.value(z.re)[k], t.value(z.im)[k]};
}

}  // namespace

TEST_CASE("burgers spectral residual") {
  const std::size_t n = 32;
  const double period = 2.0;

  SUBCASE("constant field is stationary") {
    Tape t;
    std::vector<double> u(n, 1.7), ut(n, 0.0), u2(n, 1.7 * 1.7);
    auto s = slice_inputs(t, u, ut, u2, period);
    auto r = burgers_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, 0.01);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(at(t, r, k)) <= 1e-10);
  }

  SUBCASE("frozen sin(2 pi x), nu = 0: residual lives at xi in {0, +-2}") {
    Tape t;
    std::vector<double> u(n), ut(n, 0.0), u2(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = -1.0 + period * double(j) / double(n);
      u[j] = std::sin(2.0 * kPi * x);
      u2[j] = u[j] * u[j];
    }
    auto s = slice_inputs(t, u, ut, u2, period);
    auto r = burgers_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, 0.0);
    auto u2_oracle = oracle::naive_dft_real(u2);
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = s.xi[k];
      const std::complex<double> want = std::complex<double>(0.0, kPi * xi) * u2_oracle[k];
      CHECK(std::abs(at(t, r, k) - want) <= 1e-9);
      if (std::abs(xi) > 2.01 || (std::abs(xi) > 0.01 && std::abs(xi) < 1.99))
        CHECK(std::abs(at(t, r, k)) <= 1e-9);
    }
    // xi = 2 sits at DFT index k = 4
    CHECK(std::abs(at(t, r, 4)) > 1.0);
  }

  SUBCASE("viscous term of cos(2 pi x) at xi = 1 equals 4 pi^2 nu N/2") {
    const double nu = 0.37;
    Tape t;
    std::vector<double> u(n), ut(n, 0.0), u2(n, 0.0);  // nonlinear part zeroed
    for (std::size_t j = 0; j < n; ++j) {
      const double x = -1.0 + period * double(j) / double(n);
      u[j] = std::cos(2.0 * kPi * x);
    }
    auto s = slice_inputs(t, u, ut, u2, period);
    auto r = burgers_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, nu);
    // xi = +1 is DFT index 2 on the period-2 box
    const std::complex<double> got = at(t, r, 2);
    CHECK(got.real() ==
          doctest::Approx(4.0 * kPi * kPi * nu * double(n) / 2.0).epsilon(1e-10));
    CHECK(std::abs(got.imag()) <= 1e-9);
  }
}

TEST_CASE("allen-cahn spectral residual") {
  const std::size_t n = 64;
  const double period = 2.0, alpha = 1e-4;

  SUBCASE("u = 1 and u = 0 are stationary") {
    for (double c : {1.0, 0.0}) {
      Tape t;
      std::vector<double> u(n, c), ut(n, 0.0), u3(n, c * c * c);
      auto s = slice_inputs(t, u, ut, u3, period);
      auto r = allen_cahn_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, alpha);
      for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(at(t, r, k)) <= 1e-9);
    }
  }

  SUBCASE("cubic term of sin(2 pi x) at xi = 3 matches the dense oracle") {
    Tape t;
    std::vector<double> u(n), ut(n, 0.0), u3(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = -1.0 + period * double(j) / double(n);
      u[j] = std::sin(2.0 * kPi * x);
      u3[j] = u[j] * u[j] * u[j];
    }
    auto s = slice_inputs(t, u, ut, u3, period);
    auto r = allen_cahn_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, alpha);
    auto u_oracle = oracle::naive_dft_real(u);
    auto u3_oracle = oracle::naive_dft_real(u3);
    // xi = 3 is DFT index 6; u^ vanishes there so only 5 u3^ contributes
    const std::size_t k6 = 6;
    std::complex<double> want = 5.0 * u3_oracle[k6];
    CHECK(std::abs(u_oracle[k6]) <= 1e-9);
    CHECK(std::abs(at(t, r, k6) - want) <= 1e-9);
    // sin^3 = (3 sin - sin 3)/4: the xi = 3 line carries i N/8
    CHECK(want.imag() == doctest::Approx(5.0 * double(n) / 8.0).epsilon(1e-10));
  }
}

TEST_CASE("kdv spectral residual") {
  const std::size_t n = 64;
  const double period = 2.0, delta2 = 0.0025;

  SUBCASE("constant field is stationary") {
    Tape t;
    std::vector<double> u(n, -0.4), ut(n, 0.0), uux(n, 0.0);
    auto s = slice_inputs(t, u, ut, uux, period);
    auto r = kdv_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, delta2);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(at(t, r, k)) <= 1e-10);
  }

  SUBCASE("dispersion-only residual of sin(2 pi x) matches the dense oracle") {
    Tape t;
    std::vector<double> u(n), ut(n, 0.0), uux(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = period * double(j) / double(n);
      u[j] = std::sin(2.0 * kPi * x);
    }
    auto s = slice_inputs(t, u, ut, uux, period);
    auto r = kdv_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, delta2);
    auto u_oracle = oracle::naive_dft_real(u);
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = s.xi[k];
      const std::complex<double> mult{0.0, -8.0 * kPi * kPi * kPi * delta2 * xi * xi * xi};
      CHECK(std::abs(at(t, r, k) - mult * u_oracle[k]) <= 1e-9);
    }
  }

  SUBCASE("dual nonlinear formulas agree on band-limited input") {
    // (u u_x)^ vs pi i xi (u^2)^ for u with modes <= 4 on a 64-point grid
    std::vector<double> u(n), ux(n), u2(n), uux(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = period * double(j) / double(n);
      u[j] = std::sin(2.0 * kPi * x) + 0.5 * std::cos(4.0 * kPi * x);
      ux[j] = 2.0 * kPi * std::cos(2.0 * kPi * x) - 2.0 * kPi * std::sin(4.0 * kPi * x);
      u2[j] = u[j] * u[j];
      uux[j] = u[j] * ux[j];
    }
    auto uux_hat = oracle::naive_dft_real(uux);
    auto u2_hat = oracle::naive_dft_real(u2);
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = double(signed_mode(k, n)) / period;
      const std::complex<double> alt = std::complex<double>(0.0, kPi * xi) * u2_hat[k];
      CHECK(std::abs(uux_hat[k] - alt) <=
            1e-8 * std::max(1.0, std::abs(uux_hat[k])));
    }
  }
}

TEST_CASE("spectral residuals are additive once nonlinear terms are disabled") {
  const std::size_t n = 16;
  const double period = 2.0;
  Rng rng(3);
  std::vector<double> a(n), at_(n), b(n), bt(n), ab(n), abt(n), zero(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = rng.normal();
    at_[j] = rng.normal();
    b[j] = rng.normal();
    bt[j] = rng.normal();
    ab[j] = a[j] + b[j];
    abt[j] = at_[j] + bt[j];
  }
  Tape t;
  auto sa = slice_inputs(t, a, at_, zero, period);
  auto sb = slice_inputs(t, b, bt, zero, period);
  auto sab = slice_inputs(t, ab, abt, zero, period);
  auto ra = burgers_spectral_residual(t, sa.u_hat, sa.ut_hat, sa.nl_hat, sa.xi, 0.02);
  auto rb = burgers_spectral_residual(t, sb.u_hat, sb.ut_hat, sb.nl_hat, sb.xi, 0.02);
  auto rab = burgers_spectral_residual(t, sab.u_hat, sab.ut_hat, sab.nl_hat, sab.xi, 0.02);
  for (std::size_t k = 0; k < n; ++k)
    CHECK(std::abs(at(t, rab, k) - at(t, ra, k) - at(t, rb, k)) <= 1e-12 * double(n));
}

namespace {

// manufactured band-limited space-time fields with analytic derivatives
struct Manufactured1d {
  double period, x0;
  // u = sin(2 pi x) (1 + t/2) + 0.3 cos(4 pi x) e^{-t}
  double u(double x, double t) const {
    return std::sin(2 * kPi * x) * (1 + 0.5 * t) + 0.3 * std::cos(4 * kPi * x) * std::exp(-t);
  }
  double ut(double x, double t) const {
    return 0.5 * std::sin(2 * kPi * x) - 0.3 * std::cos(4 * kPi * x) * std::exp(-t);
  }
  double ux(double x, double t) const {
    return 2 * kPi * std::cos(2 * kPi * x) * (1 + 0.5 * t) -
           1.2 * kPi * std::sin(4 * kPi * x) * std::exp(-t);
  }
  double uxx(double x, double t) const {
    return -4 * kPi * kPi * std::sin(2 * kPi * x) * (1 + 0.5 * t) -
           4.8 * kPi * kPi * std::cos(4 * kPi * x) * std::exp(-t);
  }
  double uxxx(double x, double t) const {
    return -8 * kPi * kPi * kPi * std::cos(2 * kPi * x) * (1 + 0.5 * t) +
           19.2 * kPi * kPi * kPi * std::sin(4 * kPi * x) * std::exp(-t);
  }
};

}  // namespace

TEST_CASE("physical and spectral residuals agree on band-limited fields") {
  const std::size_t n = 128;
  for (const std::string name : {"burgers", "allen_cahn", "kdv"}) {
    PdeProblem p = make_problem(name);
    Manufactured1d mf{p.period(0), p.xmin[0]};
    const double ts = 0.35;
    std::vector<double> u(n), ut(n), nl(n), phys(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = p.xmin[0] + p.period(0) * double(j) / double(n);
      u[j] = mf.u(x, ts);
      ut[j] = mf.ut(x, ts);
      const double ux = mf.ux(x, ts), uxx = mf.uxx(x, ts), uxxx = mf.uxxx(x, ts);
      switch (p.kind) {
        case PdeKind::Burgers:
          nl[j] = u[j] * u[j];
          phys[j] = ut[j] + u[j] * ux - p.nu * uxx;
          break;
        case PdeKind::AllenCahn:
          nl[j] = u[j] * u[j] * u[j];
          phys[j] = ut[j] - p.alpha * uxx + 5 * nl[j] - 5 * u[j];
          break;
        case PdeKind::Kdv:
          nl[j] = u[j] * ux;
          phys[j] = ut[j] + u[j] * ux + p.delta2 * uxxx;
          break;
        default:
          break;
      }
    }
    Tape t;
    auto s = slice_inputs(t, u, ut, nl, p.period(0));
    ComplexVar r;
    switch (p.kind) {
      case PdeKind::Burgers:
        r = burgers_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, p.nu);
        break;
      case PdeKind::AllenCahn:
        r = allen_cahn_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, p.alpha);
        break;
      case PdeKind::Kdv:
        r = kdv_spectral_residual(t, s.u_hat, s.ut_hat, s.nl_hat, s.xi, p.delta2);
        break;
      default:
        break;
    }
    auto phys_hat = oracle::naive_dft_real(phys);
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(phys_hat[k]));
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(at(t, r, k) - phys_hat[k]) <= 1e-6 * scale);
  }
}

namespace {

// two-mode manufactured stream function on the 4 pi-periodic box
struct ManufacturedPsi {
  double L;
  double mode(double kx, double ky, double x, double y) const {
    return std::sin(2 * kPi * (kx * x + ky * y) / L);
  }
  // psi = sin(k1.x)(1 + t/2) + 0.5 sin(k2.x) e^{-t}; k1 = (1,2), k2 = (2,-1)
  double psi(double x, double y, double t) const {
    return mode(1, 2, x, y) * (1 + 0.5 * t) + 0.5 * mode(2, -1, x, y) * std::exp(-t);
  }
  double psi_t(double x, double y, double t) const {
    return 0.5 * mode(1, 2, x, y) - 0.5 * mode(2, -1, x, y) * std::exp(-t);
  }
  // analytic gradients per mode
  double dpsi(double kx, double ky, double x, double y, int dx, int dy, double amp) const {
    const double w = 2 * kPi / L;
    const double arg = w * (kx * x + ky * y);
    const double fac = std::pow(w * kx, dx) * std::pow(w * ky, dy);
    const int order = dx + dy;
    double g = 0.0;
    switch (order % 4) {
      case 0: g = std::sin(arg); break;
      case 1: g = std::cos(arg); break;
      case 2: g = -std::sin(arg); break;
      case 3: g = -std::cos(arg); break;
    }
    return amp * fac * g;
  }
};

}  // namespace

TEST_CASE("navier-stokes monte-carlo residual") {
  PdeProblem p = make_navier_stokes(0.01);
  const double L = p.period(0);
  const std::size_t g = 32;  // grid samples per axis
  Tensor pts({g * g, 2});
  for (std::size_t iy = 0; iy < g; ++iy)
    for (std::size_t ix = 0; ix < g; ++ix) {
      pts.at2(iy * g + ix, 0) = p.xmin[0] + L * double(ix) / double(g);
      pts.at2(iy * g + ix, 1) = p.xmin[1] + L * double(iy) / double(g);
    }
  std::vector<std::vector<double>> modes;
  for (int ky = -6; ky <= 6; ++ky)
    for (int kx = -6; kx <= 6; ++kx) modes.push_back({kx / L, ky / L});
  auto proj = std::make_shared<McProjection>(modes, pts, L * L,
                                             1.0 / double(g * g));  // coefficient scale 1/N

  SUBCASE("psi = 0 gives a zero residual") {
    Tape t;
    Var z = t.leaf(Tensor({g * g}));
    auto r = ns_mc_residual(t, z, z, proj, p.nu);
    for (std::size_t k = 0; k < modes.size(); ++k) CHECK(std::abs(at(t, r, k)) == 0.0);
  }

  SUBCASE("a single frozen mode with nu = 0 is advection-free") {
    Tape t;
    Tensor psi({g * g}), zero({g * g});
    for (std::size_t j = 0; j < g * g; ++j)
      psi[j] = std::sin(2 * kPi * (pts.at2(j, 0) + 2 * pts.at2(j, 1)) / L);
    auto r = ns_mc_residual(t, t.leaf(psi), t.leaf(zero), proj, 0.0);
    for (std::size_t k = 0; k < modes.size(); ++k) CHECK(std::abs(at(t, r, k)) <= 1e-6);
  }

  SUBCASE("viscous term applies the vorticity multiplier to the mode") {
    const int kx = 1, ky = 2;
    Tape t;
    Tensor psi({g * g}), zero({g * g});
    for (std::size_t j = 0; j < g * g; ++j)
      psi[j] = std::sin(2 * kPi * (kx * pts.at2(j, 0) + ky * pts.at2(j, 1)) / L);
    auto r = ns_mc_residual(t, t.leaf(psi), t.leaf(zero), proj, p.nu);
    const double m = 4 * kPi * kPi * (kx * kx + ky * ky) / (L * L);
    // the sine splits into +-k coefficients -+ i/2; residual = nu m^2 psi^
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double mx = modes[k][0] * L, my = modes[k][1] * L;
      std::complex<double> want{0.0, 0.0};
      if (std::lround(mx) == kx && std::lround(my) == ky)
        want = {0.0, -0.5 * p.nu * m * m};
      if (std::lround(mx) == -kx && std::lround(my) == -ky)
        want = {0.0, 0.5 * p.nu * m * m};
      CHECK(std::abs(at(t, r, k) - want) <= 1e-9);
    }
  }

  SUBCASE("matches the transformed physical residual on manufactured fields") {
    ManufacturedPsi mf{L};
    const double ts = 0.4, nu = p.nu;
    const std::size_t N = g * g;
    Tensor psi({N}), psi_t({N});
    std::vector<double> phys(N);
    for (std::size_t j = 0; j < N; ++j) {
      const double x = pts.at2(j, 0), y = pts.at2(j, 1);
      psi[j] = mf.psi(x, y, ts);
      psi_t[j] = mf.psi_t(x, y, ts);
      const double a1 = 1 + 0.5 * ts, a2 = 0.5 * std::exp(-ts);
      auto D = [&](int dx, int dy) {
        return mf.dpsi(1, 2, x, y, dx, dy, a1) + mf.dpsi(2, -1, x, y, dx, dy, a2);
      };
      auto Dt = [&](int dx, int dy) {
        // time derivative amplitudes: 0.5 and -0.5 e^{-t}
        return mf.dpsi(1, 2, x, y, dx, dy, 0.5) + mf.dpsi(2, -1, x, y, dx, dy, -a2);
      };
      const double lap_t = Dt(2, 0) + Dt(0, 2);
      const double wx = -(D(3, 0) + D(1, 2));  // omega_x = -(psi_xxx + psi_xyy)
      const double wy = -(D(2, 1) + D(0, 3));
      const double w_xx = -(D(4, 0) + D(2, 2));
      const double w_yy = -(D(2, 2) + D(0, 4));
      // omega = -lap psi; omega_t = -lap psi_t
      phys[j] = -lap_t + D(0, 1) * wx - D(1, 0) * wy - nu * (w_xx + w_yy);
    }
    Tape t;
    auto r = ns_mc_residual(t, t.leaf(psi), t.leaf(psi_t), proj, nu);
    // oracle: grid-exact Fourier coefficients of the pointwise residual
    double scale = 0.0;
    std::vector<std::complex<double>> want(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t j = 0; j < N; ++j) {
        const double ang =
            -2 * kPi * (modes[k][0] * pts.at2(j, 0) + modes[k][1] * pts.at2(j, 1));
        s += phys[j] * std::polar(1.0, ang);
      }
      want[k] = s / double(N);
      scale = std::max(scale, std::abs(want[k]));
    }
    for (std::size_t k = 0; k < modes.size(); ++k)
      CHECK(std::abs(at(t, r, k) - want[k]) <= 1e-6 * scale);
  }

  SUBCASE("1-D projections are rejected") {
    Tensor pts1({4, 1}, {0.1, 0.2, 0.3, 0.4});
    auto bad = std::make_shared<McProjection>(std::vector<std::vector<double>>{{1.0}}, pts1,
                                              1.0, 0.25);
    Tape t;
    Var z = t.leaf(Tensor({4}));
    CHECK_THROWS_AS(ns_mc_residual(t, z, z, bad, 0.01), std::invalid_argument);
  }
}

TEST_CASE("navier-stokes initial condition") {
  Rng rng(6);
  const std::size_t n = 64;
  const double L = 4 * kPi;
  Tensor w0 = ns_initial_condition(rng, n, L);

  double mean = 0.0;
  for (std::size_t i = 0; i < w0.size(); ++i) mean += w0[i];
  mean /= double(w0.size());
  CHECK(std::abs(mean) <= 1e-12);

  // spectrum respects the |xi| <= 4 cutoff (paper wavenumber 2 pi k / L)
  std::vector<double> re(n * n), im(n * n, 0.0);
  for (std::size_t i = 0; i < n * n; ++i) re[i] = w0[i];
  dft_2d(re, im, n, n, -1);
  double inside = 0.0, outside = 0.0;
  for (std::size_t ky = 0; ky < n; ++ky)
    for (std::size_t kx = 0; kx < n; ++kx) {
      const double sy = double(signed_mode(ky, n)), sx = double(signed_mode(kx, n));
      const double r = 2 * kPi * std::hypot(sx, sy) / L;
      const double p = re[ky * n + kx] * re[ky * n + kx] + im[ky * n + kx] * im[ky * n + kx];
      (r <= 4.0 ? inside : outside) += p;
    }
  CHECK(inside > 0.0);
  CHECK(outside <= 1e-20 * inside);

  // distinct seeds give distinct draws, same seed reproduces
  Rng r2(6);
  Tensor again = ns_initial_condition(r2, n, L);
  for (std::size_t i = 0; i < w0.size(); ++i) REQUIRE(w0[i] == again[i]);
}
