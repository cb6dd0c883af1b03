#include "fepinn/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "fepinn/fft.hpp"

namespace fepinn {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

WavenumberGrid WavenumberGrid::regular(const std::vector<std::size_t>& sizes,
                                       const std::vector<double>& periods) {
  if (sizes.size() != periods.size() || sizes.empty())
    throw std::invalid_argument("WavenumberGrid: sizes/periods mismatch");
  WavenumberGrid g;
  g.period = periods;
  for (std::size_t d = 0; d < sizes.size(); ++d) {
    if (sizes[d] < 1) throw std::invalid_argument("WavenumberGrid: empty dimension");
    std::vector<double> row(sizes[d]);
    for (std::size_t k = 0; k < sizes[d]; ++k)
      row[k] = static_cast<double>(signed_mode(k, sizes[d])) / periods[d];
    g.xi.push_back(std::move(row));
  }
  return g;
}

std::size_t WavenumberGrid::total() const {
  std::size_t n = 1;
  for (const auto& row : xi) n *= row.size();
  return n;
}

std::vector<double> WavenumberGrid::point(std::size_t flat) const {
  std::vector<double> p(xi.size());
  for (std::size_t d = xi.size(); d-- > 0;) {
    const std::size_t n = xi[d].size();
    p[d] = xi[d][flat % n];
    flat /= n;
  }
  return p;
}

std::complex<double> symbol_eval_at(const SpectralSymbol& s, std::span<const double> xi) {
  if (s.terms.empty()) throw std::invalid_argument("symbol_eval: no terms");
  std::complex<double> acc{0.0, 0.0};
  for (const SymbolTerm& t : s.terms) {
    if (t.kind == SymbolKind::SignedPower) {
      if (t.alpha.size() != xi.size())
        throw std::invalid_argument("symbol_eval: term multi-index rank mismatch");
      std::complex<double> v{1.0, 0.0};
      for (std::size_t d = 0; d < xi.size(); ++d) {
        if (t.alpha[d] < 0) throw std::invalid_argument("symbol_eval: negative order");
        const std::complex<double> base{0.0, kTwoPi * xi[d]};
        for (int p = 0; p < t.alpha[d]; ++p) v *= base;
      }
      acc += t.coeff * v;
    } else {
      double r2 = 0.0;
      for (double x : xi) r2 += x * x;
      acc += t.coeff * std::pow(kTwoPi * std::sqrt(r2), t.order);
    }
  }
  return acc;
}

std::vector<std::complex<double>> symbol_eval(const SpectralSymbol& s,
                                              const WavenumberGrid& grid) {
  const std::size_t n = grid.total();
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = grid.point(i);
    out[i] = symbol_eval_at(s, p);
  }
  return out;
}

Tensor SpectralWeight::re_tensor() const {
  Tensor t({w.size()});
  for (std::size_t i = 0; i < w.size(); ++i) t[i] = w[i].real();
  return t;
}

Tensor SpectralWeight::im_tensor() const {
  Tensor t({w.size()});
  for (std::size_t i = 0; i < w.size(); ++i) t[i] = w[i].imag();
  return t;
}

SpectralWeight weight_build(const SpectralSymbol& symbol, const WavenumberGrid& grid,
                            std::optional<double> cutoff, WeightNorm norm) {
  constexpr double kEps = 1e-12;
  SpectralWeight sw;
  sw.symbol = symbol;
  sw.norm = norm;
  sw.cutoff = cutoff;
  sw.w = symbol_eval(symbol, grid);

  const std::size_t n = grid.total();
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (double x : grid.point(i)) r2 += x * x;
    const bool retained = !cutoff || std::sqrt(r2) <= *cutoff;
    if (!retained) {
      sw.w[i] = {0.0, 0.0};
      continue;
    }
    max_abs = std::max(max_abs, std::abs(sw.w[i]));
  }
  if (max_abs == 0.0)
    throw std::invalid_argument("weight_build: all retained weights are zero");
  if (norm == WeightNorm::Linf) {
    const double inv = 1.0 / (max_abs + kEps);
    for (auto& v : sw.w) v *= inv;
  }
  return sw;
}

std::size_t sample_grid_size(std::size_t lo, std::size_t hi, Rng& rng) {
  if (hi < lo) throw std::invalid_argument("sample_grid_size: empty range");
  return static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
}

RowwiseDft::RowwiseDft(std::size_t rows, std::size_t n) : rows_(rows), n_(n) {
  if (n_ < 2) throw std::invalid_argument("RowwiseDft: transform length must be >= 2");
  if (rows_ < 1) throw std::invalid_argument("RowwiseDft: empty field");
}

void RowwiseDft::apply(std::span<const double> in_re, std::span<const double> in_im,
                       std::span<double> out_re, std::span<double> out_im) const {
  std::copy(in_re.begin(), in_re.end(), out_re.begin());
  std::copy(in_im.begin(), in_im.end(), out_im.begin());
  dft_rows(out_re, out_im, rows_, n_, -1);
}

void RowwiseDft::apply_adjoint(std::span<const double> in_re, std::span<const double> in_im,
                               std::span<double> out_re, std::span<double> out_im) const {
  // the DFT matrix is symmetric, so the conjugate transpose is the +1-sign
  // (unnormalized synthesis) transform
  std::copy(in_re.begin(), in_re.end(), out_re.begin());
  std::copy(in_im.begin(), in_im.end(), out_im.begin());
  dft_rows(out_re, out_im, rows_, n_, +1);
}

McProjection::McProjection(std::vector<std::vector<double>> modes, const Tensor& points,
                           double volume, double scale)
    : modes_(std::move(modes)), volume_(volume), scale_(scale) {
  k_ = modes_.size();
  if (k_ == 0) throw std::invalid_argument("McProjection: empty mode set");
  const std::size_t dim = modes_[0].size();
  if (points.rank() != 2 || points.extent(1) != dim)
    throw std::invalid_argument("McProjection: points must be N x dim");
  n_ = points.extent(0);
  phi_re_.resize(k_ * n_);
  phi_im_.resize(k_ * n_);
  for (std::size_t k = 0; k < k_; ++k) {
    if (modes_[k].size() != dim)
      throw std::invalid_argument("McProjection: ragged mode set");
    for (std::size_t j = 0; j < n_; ++j) {
      double dot = 0.0;
      for (std::size_t d = 0; d < dim; ++d) dot += modes_[k][d] * points.at2(j, d);
      const double ang = -kTwoPi * dot;
      phi_re_[k * n_ + j] = std::cos(ang);
      phi_im_[k * n_ + j] = std::sin(ang);
    }
  }
}

void McProjection::apply(std::span<const double> in_re, std::span<const double> in_im,
                         std::span<double> out_re, std::span<double> out_im) const {
  for (std::size_t k = 0; k < k_; ++k) {
    const double* pr = phi_re_.data() + k * n_;
    const double* pi = phi_im_.data() + k * n_;
    double sr = 0.0, si = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      sr += pr[j] * in_re[j] - pi[j] * in_im[j];
      si += pr[j] * in_im[j] + pi[j] * in_re[j];
    }
    out_re[k] = scale_ * sr;
    out_im[k] = scale_ * si;
  }
}

void McProjection::apply_adjoint(std::span<const double> in_re, std::span<const double> in_im,
                                 std::span<double> out_re, std::span<double> out_im) const {
  for (std::size_t j = 0; j < n_; ++j) {
    out_re[j] = 0.0;
    out_im[j] = 0.0;
  }
  for (std::size_t k = 0; k < k_; ++k) {
    const double* pr = phi_re_.data() + k * n_;
    const double* pi = phi_im_.data() + k * n_;
    const double ar = scale_ * in_re[k], ai = scale_ * in_im[k];
    for (std::size_t j = 0; j < n_; ++j) {
      // conj(Phi_{kj}) * a
      out_re[j] += pr[j] * ar + pi[j] * ai;
      out_im[j] += pr[j] * ai - pi[j] * ar;
    }
  }
}

ComplexVar dft_forward(Tape& t, Var field, std::size_t rows, std::size_t n) {
  auto op = std::make_shared<RowwiseDft>(rows, n);
  return t.linear_op(std::move(op), field);
}

ComplexVar mc_project(Tape& t, const std::shared_ptr<const McProjection>& proj, Var samples) {
  return t.linear_op(proj, samples);
}

}  // namespace fepinn
