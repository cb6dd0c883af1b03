#include "fepinn/solver.hpp"

#include <cmath>
#include <complex>
#include <iostream>
#include <stdexcept>

#include "fepinn/fft.hpp"

namespace fepinn {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

using cd = std::complex<double>;

struct Spectrum {
  std::vector<double> re, im;
  explicit Spectrum(std::size_t n) : re(n, 0.0), im(n, 0.0) {}
  std::size_t size() const { return re.size(); }
};

// zero-padded pointwise product: spectra in, spectrum of f*g out (alias-free
// for inputs band-limited to n/2 under the 2x pad)
class Dealias1d {
public:
  explicit Dealias1d(std::size_t n) : n_(n), m_(2 * n) {}

  void to_padded_field(const Spectrum& s, std::vector<double>& fre,
                       std::vector<double>& fim) const {
    fre.assign(m_, 0.0);
    fim.assign(m_, 0.0);
    const double scale = double(m_) / double(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const long long sm = signed_mode(k, n_);
      const std::size_t kp = sm >= 0 ? std::size_t(sm) : m_ - std::size_t(-sm);
      fre[kp] = scale * s.re[k];
      fim[kp] = scale * s.im[k];
    }
    dft_inplace(fre, fim, +1);
    const double inv = 1.0 / double(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      fre[i] *= inv;
      fim[i] *= inv;
    }
  }

  Spectrum product(const Spectrum& a, const Spectrum& b) const {
    std::vector<double> ar, ai, br, bi;
    to_padded_field(a, ar, ai);
    to_padded_field(b, br, bi);
    for (std::size_t i = 0; i < m_; ++i) {
      // real fields: imaginary parts are roundoff
      ar[i] *= br[i];
      ai[i] = 0.0;
    }
    dft_inplace(ar, ai, -1);
    Spectrum out(n_);
    const double scale = double(n_) / double(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const long long sm = signed_mode(k, n_);
      const std::size_t kp = sm >= 0 ? std::size_t(sm) : m_ - std::size_t(-sm);
      out.re[k] = scale * ar[kp];
      out.im[k] = scale * ai[kp];
    }
    return out;
  }

private:
  std::size_t n_, m_;
};

void axpy(Spectrum& y, const Spectrum& x, double a) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    y.re[i] += a * x.re[i];
    y.im[i] += a * x.im[i];
  }
}

void cmul_inplace(Spectrum& s, const std::vector<cd>& m) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double re = s.re[i] * m[i].real() - s.im[i] * m[i].imag();
    s.im[i] = s.re[i] * m[i].imag() + s.im[i] * m[i].real();
    s.re[i] = re;
  }
}

Spectrum cmul(const Spectrum& s, const std::vector<cd>& m) {
  Spectrum out = s;
  cmul_inplace(out, m);
  return out;
}

std::vector<double> synth_real(const Spectrum& s) {
  std::vector<double> re = s.re, im = s.im;
  dft_inplace(re, im, +1);
  const double inv = 1.0 / double(s.size());
  for (double& v : re) v *= inv;
  return re;
}

}  // namespace

std::size_t SolutionGrid::space_size() const {
  std::size_t n = 1;
  for (std::size_t s : space_shape) n *= s;
  return n;
}

std::span<const double> SolutionGrid::slice(std::size_t i) const {
  return {values.data() + i * space_size(), space_size()};
}

SolutionGrid SolutionGrid::downsample_space(std::size_t factor) const {
  SolutionGrid out = *this;
  out.values.clear();
  for (auto& s : out.space_shape) {
    if (s % factor != 0) throw std::invalid_argument("downsample_space: factor must divide");
    s /= factor;
  }
  const std::size_t coarse = out.space_size();
  out.values.reserve(times.size() * coarse);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    auto sl = slice(ti);
    if (space_shape.size() == 1) {
      for (std::size_t j = 0; j < coarse; ++j) out.values.push_back(sl[j * factor]);
    } else {
      const std::size_t nx = space_shape[1];
      for (std::size_t y = 0; y < out.space_shape[0]; ++y)
        for (std::size_t x = 0; x < out.space_shape[1]; ++x)
          out.values.push_back(sl[y * factor * nx + x * factor]);
    }
  }
  return out;
}

SolutionGrid solve(const PdeProblem& p, const SolveOptions& opt) {
  if (p.spatial_dims != 1) throw std::invalid_argument("solve: 1-D problems only");
  const std::size_t n = opt.resolution;
  const double L = p.period(0);
  const double span = p.t1 - p.t0;

  // step counts rounded so saved slices land exactly on step boundaries
  const std::size_t segments = opt.save_slices - 1;
  std::size_t per_segment =
      std::max<std::size_t>(1, (std::size_t)std::llround(span / (opt.dt * double(segments))));
  const double dt = span / double(segments * per_segment);

  // linear symbol and the multiplier applied to F[u^2] in the nonlinear term
  std::vector<cd> lin(n), nl_mult(n);
  bool advective = false;
  double cubic_coeff = 0.0;  // Allen-Cahn -5 u^3
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = double(signed_mode(k, n)) / L;
    switch (p.kind) {
      case PdeKind::Burgers:
        lin[k] = {-4.0 * kPi * kPi * p.nu * xi * xi, 0.0};
        nl_mult[k] = {0.0, -kPi * xi};  // -pi i xi F[u^2] = -F[u u_x]
        advective = true;
        break;
      case PdeKind::AllenCahn:
        lin[k] = {-4.0 * kPi * kPi * p.alpha * xi * xi + 5.0, 0.0};
        nl_mult[k] = {0.0, 0.0};
        cubic_coeff = -5.0;
        break;
      case PdeKind::Kdv:
        lin[k] = {0.0, 8.0 * kPi * kPi * kPi * p.delta2 * xi * xi * xi};
        nl_mult[k] = {0.0, -kPi * xi};
        advective = true;
        break;
      default:
        throw std::invalid_argument("solve: unsupported problem " + p.name);
    }
  }

  // initial spectrum
  Spectrum u_hat(n);
  {
    std::vector<double> u0(n);
    double umax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = p.xmin[0] + L * double(j) / double(n);
      u0[j] = opt.initial_override ? opt.initial_override(x)
                                   : p.initial_value(std::span<const double>{&x, 1});
      umax = std::max(umax, std::abs(u0[j]));
    }
    if (advective && !opt.disable_nonlinear && umax * dt * double(n) / L > 0.5)
      std::cerr << "[fepinn] warning: advective CFL number "
                << umax * dt * double(n) / L << " looks unsafe for " << p.name << "\n";
    std::copy(u0.begin(), u0.end(), u_hat.re.begin());
    dft_inplace(u_hat.re, u_hat.im, -1);
  }

  Dealias1d dealias(n);
  const bool quadratic_nl =
      !opt.disable_nonlinear && (p.kind == PdeKind::Burgers || p.kind == PdeKind::Kdv);
  const bool cubic_nl = !opt.disable_nonlinear && cubic_coeff != 0.0;
  auto nonlinear = [&](const Spectrum& s) {
    Spectrum out(n);
    if (quadratic_nl) {
      out = cmul(dealias.product(s, s), nl_mult);
    } else if (cubic_nl) {
      Spectrum cube = dealias.product(dealias.product(s, s), s);
      for (std::size_t k = 0; k < n; ++k) {
        out.re[k] = cubic_coeff * cube.re[k];
        out.im[k] = cubic_coeff * cube.im[k];
      }
    }
    return out;
  };

  std::vector<cd> e_half(n), e_full(n);
  for (std::size_t k = 0; k < n; ++k) {
    e_half[k] = std::exp(lin[k] * (dt / 2.0));
    e_full[k] = std::exp(lin[k] * dt);
  }

  SolutionGrid sol;
  sol.pde = p.name;
  sol.space_shape = {n};
  sol.xmin = p.xmin;
  sol.xmax = p.xmax;
  sol.coeffs = {{"nu", p.nu}, {"alpha", p.alpha}, {"delta2", p.delta2}};
  sol.dt = dt;

  auto record = [&](double time) {
    auto u = synth_real(u_hat);
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    if (umax > 1e6)
      throw NumericalError("solver blow-up in " + p.name + " at t=" + std::to_string(time) +
                           " (|u|_inf > 1e6)");
    sol.times.push_back(time);
    sol.values.insert(sol.values.end(), u.begin(), u.end());
  };

  record(p.t0);
  for (std::size_t seg = 0; seg < segments; ++seg) {
    for (std::size_t s = 0; s < per_segment; ++s) {
      // integrating-factor RK4
      Spectrum a = nonlinear(u_hat);

      Spectrum stage = u_hat;
      axpy(stage, a, dt / 2.0);
      cmul_inplace(stage, e_half);
      Spectrum b = nonlinear(stage);

      stage = cmul(u_hat, e_half);
      axpy(stage, b, dt / 2.0);
      Spectrum c = nonlinear(stage);

      stage = cmul(u_hat, e_full);
      Spectrum ec = cmul(c, e_half);
      axpy(stage, ec, dt);
      Spectrum d = nonlinear(stage);

      Spectrum next = cmul(u_hat, e_full);
      Spectrum ea = cmul(a, e_full);
      axpy(next, ea, dt / 6.0);
      Spectrum eb = cmul(b, e_half);
      axpy(next, eb, dt / 3.0);
      axpy(next, ec, dt / 3.0);
      axpy(next, d, dt / 6.0);
      u_hat = std::move(next);
    }
    record(p.t0 + span * double(seg + 1) / double(segments));
  }
  return sol;
}

namespace {

// 2-D spectra on an n x n grid with 2x zero-padded products
class Dealias2d {
public:
  explicit Dealias2d(std::size_t n) : n_(n), m_(2 * n) {}

  void to_padded_field(const std::vector<double>& sre, const std::vector<double>& sim,
                       std::vector<double>& fre, std::vector<double>& fim) const {
    fre.assign(m_ * m_, 0.0);
    fim.assign(m_ * m_, 0.0);
    const double scale = double(m_ * m_) / double(n_ * n_);
    for (std::size_t ky = 0; ky < n_; ++ky) {
      const long long sy = signed_mode(ky, n_);
      const std::size_t yp = sy >= 0 ? std::size_t(sy) : m_ - std::size_t(-sy);
      for (std::size_t kx = 0; kx < n_; ++kx) {
        const long long sx = signed_mode(kx, n_);
        const std::size_t xp = sx >= 0 ? std::size_t(sx) : m_ - std::size_t(-sx);
        fre[yp * m_ + xp] = scale * sre[ky * n_ + kx];
        fim[yp * m_ + xp] = scale * sim[ky * n_ + kx];
      }
    }
    dft_2d(fre, fim, m_, m_, +1);
    const double inv = 1.0 / double(m_ * m_);
    for (std::size_t i = 0; i < m_ * m_; ++i) {
      fre[i] *= inv;
      fim[i] *= inv;
    }
  }

  // F[a*b + c*d] truncated back to the n x n band
  void product_sum(const std::vector<double>& a_re, const std::vector<double>& a_im,
                   const std::vector<double>& b_re, const std::vector<double>& b_im,
                   const std::vector<double>& c_re, const std::vector<double>& c_im,
                   const std::vector<double>& d_re, const std::vector<double>& d_im,
                   std::vector<double>& out_re, std::vector<double>& out_im) const {
    std::vector<double> ar, ai, br, bi, cr, ci, dr, di;
    to_padded_field(a_re, a_im, ar, ai);
    to_padded_field(b_re, b_im, br, bi);
    to_padded_field(c_re, c_im, cr, ci);
    to_padded_field(d_re, d_im, dr, di);
    for (std::size_t i = 0; i < ar.size(); ++i) {
      ar[i] = ar[i] * br[i] + cr[i] * dr[i];
      ai[i] = 0.0;
    }
    dft_2d(ar, ai, m_, m_, -1);
    out_re.assign(n_ * n_, 0.0);
    out_im.assign(n_ * n_, 0.0);
    const double scale = double(n_ * n_) / double(m_ * m_);
    for (std::size_t ky = 0; ky < n_; ++ky) {
      const long long sy = signed_mode(ky, n_);
      const std::size_t yp = sy >= 0 ? std::size_t(sy) : m_ - std::size_t(-sy);
      for (std::size_t kx = 0; kx < n_; ++kx) {
        const long long sx = signed_mode(kx, n_);
        const std::size_t xp = sx >= 0 ? std::size_t(sx) : m_ - std::size_t(-sx);
        out_re[ky * n_ + kx] = scale * ar[yp * m_ + xp];
        out_im[ky * n_ + kx] = scale * ai[yp * m_ + xp];
      }
    }
  }

private:
  std::size_t n_, m_;
};

}  // namespace

SolutionGrid ns_solve(const PdeProblem& p, const Tensor& omega0, const NsSolveOptions& opt) {
  if (p.kind != PdeKind::NavierStokes)
    throw std::invalid_argument("ns_solve: expects the Navier-Stokes problem");
  const std::size_t n = opt.resolution;
  const std::size_t total = n * n;
  const double L = p.period(0);

  Tensor w0 = omega0;
  if (w0.size() == 0) {
    Rng rng(opt.seed);
    w0 = ns_initial_condition(rng, n, L);
  }
  if (w0.size() != total) throw std::invalid_argument("ns_solve: omega0 resolution mismatch");

  // wavenumbers xi = k / L and multipliers
  std::vector<double> xix(total), xiy(total), lap(total);
  for (std::size_t ky = 0; ky < n; ++ky)
    for (std::size_t kx = 0; kx < n; ++kx) {
      const std::size_t i = ky * n + kx;
      xix[i] = double(signed_mode(kx, n)) / L;
      xiy[i] = double(signed_mode(ky, n)) / L;
      lap[i] = 4.0 * kPi * kPi * (xix[i] * xix[i] + xiy[i] * xiy[i]);
    }

  std::vector<double> wre(total), wim(total, 0.0);
  for (std::size_t i = 0; i < total; ++i) wre[i] = w0[i];
  dft_2d(wre, wim, n, n, -1);

  Dealias2d dealias(n);
  auto nonlinear = [&](const std::vector<double>& sre, const std::vector<double>& sim,
                       std::vector<double>& out_re, std::vector<double>& out_im) {
    if (opt.disable_advection) {
      out_re.assign(total, 0.0);
      out_im.assign(total, 0.0);
      return;
    }
    std::vector<double> ur(total), ui(total), vr(total), vi(total), wxr(total), wxi(total),
        wyr(total), wyi(total);
    for (std::size_t i = 0; i < total; ++i) {
      const double inv_lap = lap[i] > 0.0 ? 1.0 / lap[i] : 0.0;
      const double pr = sre[i] * inv_lap, pi_ = sim[i] * inv_lap;  // psi^ = omega^/lap
      // u = d psi/dy, v = -d psi/dx, wx = d omega/dx, wy = d omega/dy
      ur[i] = -kTwoPi * xiy[i] * pi_;
      ui[i] = kTwoPi * xiy[i] * pr;
      vr[i] = kTwoPi * xix[i] * pi_;
      vi[i] = -kTwoPi * xix[i] * pr;
      wxr[i] = -kTwoPi * xix[i] * sim[i];
      wxi[i] = kTwoPi * xix[i] * sre[i];
      wyr[i] = -kTwoPi * xiy[i] * sim[i];
      wyi[i] = kTwoPi * xiy[i] * sre[i];
    }
    dealias.product_sum(ur, ui, wxr, wxi, vr, vi, wyr, wyi, out_re, out_im);
    for (std::size_t i = 0; i < total; ++i) {
      out_re[i] = -out_re[i];
      out_im[i] = -out_im[i];
    }
  };

  const std::size_t segments = opt.save_slices - 1;
  const double window = opt.save_t1 - opt.save_t0;
  // uniform step count chosen so the window start and the slice times land
  // on step boundaries
  std::size_t per_segment = std::max<std::size_t>(
      1, (std::size_t)std::llround(window / (opt.dt * double(segments))));
  const double dt = window / double(segments * per_segment);
  const std::size_t lead_steps = (std::size_t)std::llround(opt.save_t0 / dt);

  std::vector<double> e_half(total), e_full(total);
  for (std::size_t i = 0; i < total; ++i) {
    e_half[i] = std::exp(-p.nu * lap[i] * dt / 2.0);
    e_full[i] = std::exp(-p.nu * lap[i] * dt);
  }

  SolutionGrid sol;
  sol.pde = p.name;
  sol.space_shape = {n, n};
  sol.xmin = p.xmin;
  sol.xmax = p.xmax;
  sol.coeffs = {{"nu", p.nu}};
  sol.dt = dt;
  sol.seed = opt.seed;

  auto record = [&](double time) {
    std::vector<double> fre = wre, fim = wim;
    dft_2d(fre, fim, n, n, +1);
    const double inv = 1.0 / double(total);
    double wmax = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
      fre[i] *= inv;
      wmax = std::max(wmax, std::abs(fre[i]));
    }
    if (wmax > 1e6)
      throw NumericalError("ns_solve blow-up at t=" + std::to_string(time));
    sol.times.push_back(time);
    sol.values.insert(sol.values.end(), fre.begin(), fre.begin() + total);
  };

  std::vector<double> a_re(total), a_im(total), b_re(total), b_im(total), c_re(total),
      c_im(total), d_re(total), d_im(total), sre(total), sim(total);
  auto step = [&] {
    nonlinear(wre, wim, a_re, a_im);
    for (std::size_t i = 0; i < total; ++i) {
      sre[i] = (wre[i] + dt / 2.0 * a_re[i]) * e_half[i];
      sim[i] = (wim[i] + dt / 2.0 * a_im[i]) * e_half[i];
    }
    nonlinear(sre, sim, b_re, b_im);
    for (std::size_t i = 0; i < total; ++i) {
      sre[i] = wre[i] * e_half[i] + dt / 2.0 * b_re[i];
      sim[i] = wim[i] * e_half[i] + dt / 2.0 * b_im[i];
    }
    nonlinear(sre, sim, c_re, c_im);
    for (std::size_t i = 0; i < total; ++i) {
      sre[i] = wre[i] * e_full[i] + dt * c_re[i] * e_half[i];
      sim[i] = wim[i] * e_full[i] + dt * c_im[i] * e_half[i];
    }
    nonlinear(sre, sim, d_re, d_im);
    for (std::size_t i = 0; i < total; ++i) {
      wre[i] = wre[i] * e_full[i] +
               dt / 6.0 * (a_re[i] * e_full[i] + 2.0 * (b_re[i] + c_re[i]) * e_half[i] +
                           d_re[i]);
      wim[i] = wim[i] * e_full[i] +
               dt / 6.0 * (a_im[i] * e_full[i] + 2.0 * (b_im[i] + c_im[i]) * e_half[i] +
                           d_im[i]);
    }
  };

  for (std::size_t s = 0; s < lead_steps; ++s) step();
  record(opt.save_t0);
  for (std::size_t seg = 0; seg < segments; ++seg) {
    for (std::size_t s = 0; s < per_segment; ++s) step();
    record(opt.save_t0 + window * double(seg + 1) / double(segments));
  }
  return sol;
}

double resolution_doubling_gap(const PdeProblem& p, const SolveOptions& opt) {
  SolutionGrid coarse = solve(p, opt);
  SolveOptions fine_opt = opt;
  fine_opt.resolution = 2 * opt.resolution;
  SolutionGrid fine = solve(p, fine_opt).downsample_space(2);
  double gap = 0.0;
  for (std::size_t i = 0; i < coarse.values.size(); ++i)
    gap = std::max(gap, std::abs(coarse.values[i] - fine.values[i]));
  return gap;
}

}  // namespace fepinn
