#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "fepinn/rng.hpp"
#include "fepinn/tape.hpp"
#include "fepinn/tensor.hpp"

namespace fepinn {

/// Signed Fourier wavenumbers xi = k/s for a periodic box, standard DFT
/// ordering per dimension.
struct WavenumberGrid {
  std::vector<std::vector<double>> xi;  // xi[d][j]
  std::vector<double> period;

  static WavenumberGrid regular(const std::vector<std::size_t>& sizes,
                                const std::vector<double>& periods);

  std::size_t dims() const { return xi.size(); }
  std::size_t total() const;
  /// flat index -> per-dimension xi values (row-major over dimensions)
  std::vector<double> point(std::size_t flat) const;
};

enum class SymbolKind {
  SignedPower,  // prod_d (2 pi i xi_d)^{alpha_d}, integer orders
  RadialPower,  // |2 pi xi|^r, fractional r allowed
};

struct SymbolTerm {
  std::complex<double> coeff{1.0, 0.0};
  SymbolKind kind = SymbolKind::SignedPower;
  std::vector<int> alpha;  // SignedPower: per-dimension integer orders
  double order = 0.0;      // RadialPower exponent

  static SymbolTerm signed_power(std::complex<double> c, int order_1d) {
    return SymbolTerm{c, SymbolKind::SignedPower, {order_1d}, 0.0};
  }
  static SymbolTerm radial_power(std::complex<double> c, double r) {
    return SymbolTerm{c, SymbolKind::RadialPower, {}, r};
  }
};

/// Pseudo-differential symbol P(xi) as a sum of terms.
struct SpectralSymbol {
  std::vector<SymbolTerm> terms;
};

std::complex<double> symbol_eval_at(const SpectralSymbol& s, std::span<const double> xi);
std::vector<std::complex<double>> symbol_eval(const SpectralSymbol& s,
                                              const WavenumberGrid& grid);

enum class WeightNorm { None, Linf };

/// The spectral weight W(xi) = P(xi)/(max_retained |P| + eps), zeroed beyond
/// the radial cutoff when one is set.
struct SpectralWeight {
  SpectralSymbol symbol;
  WeightNorm norm = WeightNorm::Linf;
  std::optional<double> cutoff;  // on |xi|
  std::vector<std::complex<double>> w;  // flattened over the grid

  Tensor re_tensor() const;
  Tensor im_tensor() const;
};

SpectralWeight weight_build(const SpectralSymbol& symbol, const WavenumberGrid& grid,
                            std::optional<double> cutoff, WeightNorm norm);

/// Uniform grid-size draw for the randomized-mesh training option (inclusive
/// integer range).
std::size_t sample_grid_size(std::size_t lo, std::size_t hi, Rng& rng);

// ---- tape-registered linear spectral operators ----

/// Row-wise spatial DFT on a (rows x n) real or complex field; rows are time
/// slices. Forward is the unnormalized analysis transform, the adjoint its
/// conjugate transpose.
class RowwiseDft final : public LinearMap {
public:
  RowwiseDft(std::size_t rows, std::size_t n);
  std::size_t in_size() const override { return rows_ * n_; }
  std::size_t out_size() const override { return rows_ * n_; }
  void apply(std::span<const double> in_re, std::span<const double> in_im,
             std::span<double> out_re, std::span<double> out_im) const override;
  void apply_adjoint(std::span<const double> in_re, std::span<const double> in_im,
                     std::span<double> out_re, std::span<double> out_im) const override;

  std::size_t rows() const { return rows_; }
  std::size_t n() const { return n_; }

private:
  std::size_t rows_, n_;
};

/// Monte-Carlo Fourier projection F[f] = scale * Phi f with
/// Phi_{kj} = e^{-2 pi i <xi_k, x_j>}. Dense by design at desk scale.
class McProjection final : public LinearMap {
public:
  /// modes: K x dim wavenumbers; points: N x dim sample locations
  McProjection(std::vector<std::vector<double>> modes, const Tensor& points, double volume,
               double scale);

  std::size_t in_size() const override { return n_; }
  std::size_t out_size() const override { return k_; }
  void apply(std::span<const double> in_re, std::span<const double> in_im,
             std::span<double> out_re, std::span<double> out_im) const override;
  void apply_adjoint(std::span<const double> in_re, std::span<const double> in_im,
                     std::span<double> out_re, std::span<double> out_im) const override;

  const std::vector<std::vector<double>>& modes() const { return modes_; }
  double volume() const { return volume_; }
  double scale() const { return scale_; }
  std::size_t samples() const { return n_; }

private:
  std::vector<std::vector<double>> modes_;
  std::size_t k_ = 0, n_ = 0;
  double volume_ = 1.0, scale_ = 1.0;
  std::vector<double> phi_re_, phi_im_;  // K x N
};

/// Swaps the forward and adjoint actions of an underlying map (used to
/// reconstruct fields from Monte-Carlo coefficients through Phi^H).
class AdjointMap final : public LinearMap {
public:
  explicit AdjointMap(std::shared_ptr<const LinearMap> base) : base_(std::move(base)) {}
  std::size_t in_size() const override { return base_->out_size(); }
  std::size_t out_size() const override { return base_->in_size(); }
  void apply(std::span<const double> in_re, std::span<const double> in_im,
             std::span<double> out_re, std::span<double> out_im) const override {
    base_->apply_adjoint(in_re, in_im, out_re, out_im);
  }
  void apply_adjoint(std::span<const double> in_re, std::span<const double> in_im,
                     std::span<double> out_re, std::span<double> out_im) const override {
    base_->apply(in_re, in_im, out_re, out_im);
  }

private:
  std::shared_ptr<const LinearMap> base_;
};

/// dft_forward on tape: spatial transform of a real (rows x n) field, one
/// row per time slice. Grid sizes below 2 are rejected.
ComplexVar dft_forward(Tape& t, Var field, std::size_t rows, std::size_t n);

/// Monte-Carlo projection of a real sample vector on tape.
ComplexVar mc_project(Tape& t, const std::shared_ptr<const McProjection>& proj, Var samples);

}  // namespace fepinn
