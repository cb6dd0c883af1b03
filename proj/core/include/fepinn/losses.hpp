#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fepinn/net.hpp"
#include "fepinn/pde.hpp"
#include "fepinn/spectral.hpp"
#include "fepinn/tape.hpp"

namespace fepinn {

enum class WeightMode { Fixed, GradNormTuned };

struct LossWeights {
  double physics = 1.0;
  double boundary = 10.0;
  double fourier = 0.0;
  double compat = 0.0;  // Navier-Stokes stream/vorticity compatibility
  WeightMode mode = WeightMode::Fixed;
  double alpha_ema = 0.9;
};

struct QuantileSpec {
  double tau = 0.925;
  bool enabled = false;
};

struct LossReport {
  double physics = 0.0, initial = 0.0, boundary = 0.0, fourier = 0.0, compat = 0.0;
  double total = 0.0;
  std::vector<std::pair<std::string, double>> grad_norms;
};

/// Mean squared pointwise PDE residual over a collocation batch.
Var physics_loss(Tape& t, const PdeProblem& p, const std::vector<JetBundle>& out);

/// Initial-profile MSE plus periodic-mismatch MSE. `init_points` are full
/// coordinates at t = t0 with `init_targets` the profile values;
/// `bdry_a`/`bdry_b` are paired points on the two periodic faces.
struct BoundaryLosses {
  Var initial, boundary;
};
BoundaryLosses boundary_initial_loss(Tape& t, const JetNet& net, const Tensor& init_points,
                                     const Tensor& init_targets, const Tensor& bdry_a,
                                     const Tensor& bdry_b);

/// Quantile reduction of a batch of |weighted residual| magnitudes.
Var quantile_reduce(Tape& t, Var magnitudes, const QuantileSpec& q);

/// Fourier-enhanced loss on a full space-time mesh (1-D problems): evaluates
/// the network over the mesh, transforms each time slice, applies the
/// problem's spectral residual and the weight W(xi), reduces by mean |.|^2 or
/// by quantile of |.|.
struct GridFourierSpec {
  std::size_t nx = 64;
  std::size_t nt = 16;
};
Var fourier_loss_grid(Tape& t, const PdeProblem& p, const JetNet& net, GridFourierSpec grid,
                      const SpectralWeight& weight, const QuantileSpec& q,
                      JetNet::Bound* bound = nullptr);

/// Mesh-invariant Monte-Carlo variant; one projection per time slice so
/// non-square domains (per-slice slabs) are handled uniformly.
struct McBatch {
  std::vector<double> times;
  std::vector<std::shared_ptr<const McProjection>> proj;
  std::vector<Tensor> points;  // per slice: N x (dim+1) full space-time coords
};
Var fourier_loss_mc(Tape& t, const PdeProblem& p, const JetNet& net, const McBatch& batch,
                    const SpectralWeight& weight, const QuantileSpec& q,
                    JetNet::Bound* bound = nullptr);

/// Weight W(xi) evaluated on an explicit (Monte-Carlo) mode list rather than
/// a full DFT grid; same normalization and cutoff semantics as weight_build.
SpectralWeight weight_build_modes(const SpectralSymbol& symbol,
                                  const std::vector<std::vector<double>>& modes,
                                  std::optional<double> cutoff, WeightNorm norm);

/// lambda_i <- alpha * (sum_k |g_k|) / |g_i| + (1 - alpha) * lambda_i, with
/// zero-norm terms frozen for the step.
std::vector<double> grad_norm_tune(const std::vector<double>& norms,
                                   const std::vector<double>& lambda_old, double alpha_ema);

/// total = lp * physics + lb * (initial + boundary) + lf * fourier
///         (+ lc * compat); absent terms are skipped. Fills `report`.
struct LossTerms {
  Var physics, initial, boundary, fourier, compat;
};
Var combine_loss(Tape& t, const LossTerms& terms, const LossWeights& w, LossReport* report);

}  // namespace fepinn
