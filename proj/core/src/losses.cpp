#include "fepinn/losses.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace fepinn {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

Var physics_loss(Tape& t, const PdeProblem& p, const std::vector<JetBundle>& out) {
  Var r = physical_residual(t, p, out);
  return t.mean(t.mul(r, r));
}

BoundaryLosses boundary_initial_loss(Tape& t, const JetNet& net, const Tensor& init_points,
                                     const Tensor& init_targets, const Tensor& bdry_a,
                                     const Tensor& bdry_b) {
  JetSpec values_only{net.config().in_dim == 3 ? 2 : 1, 0, false, false, false};
  BoundaryLosses out;

  auto value_head = [&](const Tensor& pts) {
    // scalar problems fit the first head; the Navier-Stokes initial/boundary
    // data constrains the vorticity head
    auto jets = net.forward_jet(t, pts, values_only);
    return net.config().out_dim == 2 ? jets[1].value : jets[0].value;
  };

  Var u0 = value_head(init_points);
  Var diff = t.sub(u0, t.leaf(init_targets));
  out.initial = t.mean(t.mul(diff, diff));

  Var ua = value_head(bdry_a);
  Var ub = value_head(bdry_b);
  Var mismatch = t.sub(ua, ub);
  out.boundary = t.mean(t.mul(mismatch, mismatch));
  return out;
}

Var quantile_reduce(Tape& t, Var magnitudes, const QuantileSpec& q) {
  if (!(q.tau > 0.0 && q.tau <= 1.0))
    throw std::invalid_argument("quantile_reduce: tau outside (0, 1]");
  if (q.tau < 0.9 || q.tau > 0.99) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "[fepinn] warning: quantile tau=" << q.tau
                << " outside the recommended [0.9, 0.99] band\n";
      warned = true;
    }
  }
  return t.quantile_select(magnitudes, q.tau);
}

namespace {

Tensor tile_rows(const Tensor& row, std::size_t rows) {
  Tensor out({rows * row.size()});
  for (std::size_t r = 0; r < rows; ++r)
    std::copy(row.data(), row.data() + row.size(), out.data() + r * row.size());
  return out;
}

Var reduce_weighted(Tape& t, ComplexVar wr, const QuantileSpec& q) {
  if (q.enabled) return quantile_reduce(t, cabs(t, wr), q);
  return t.mean(cabs2(t, wr));
}

ComplexVar spectral_residual_for(Tape& t, const PdeProblem& p, ComplexVar u_hat,
                                 ComplexVar ut_hat, ComplexVar nl_hat, const Tensor& xi) {
  switch (p.kind) {
    case PdeKind::Burgers:
      return burgers_spectral_residual(t, u_hat, ut_hat, nl_hat, xi, p.nu);
    case PdeKind::AllenCahn:
      return allen_cahn_spectral_residual(t, u_hat, ut_hat, nl_hat, xi, p.alpha);
    case PdeKind::Kdv:
      return kdv_spectral_residual(t, u_hat, ut_hat, nl_hat, xi, p.delta2);
    default:
      throw std::invalid_argument("spectral residual: unsupported problem " + p.name);
  }
}

// the pointwise field whose transform feeds the nonlinear term
Var nonlinear_field(Tape& t, const PdeProblem& p, const JetBundle& u) {
  switch (p.kind) {
    case PdeKind::Burgers:
      return t.mul(u.value, u.value);  // u^2
    case PdeKind::AllenCahn:
      return t.mul(t.mul(u.value, u.value), u.value);  // u^3
    case PdeKind::Kdv:
      return t.mul(u.value, u.get(Deriv::X));  // u u_x
    default:
      throw std::invalid_argument("nonlinear_field: unsupported problem " + p.name);
  }
}

}  // namespace

Var fourier_loss_grid(Tape& t, const PdeProblem& p, const JetNet& net, GridFourierSpec grid,
                      const SpectralWeight& weight, const QuantileSpec& q,
                      JetNet::Bound* bound) {
  if (p.kind == PdeKind::NavierStokes)
    throw std::invalid_argument("fourier_loss_grid: Navier-Stokes uses the Monte-Carlo path");
  if (weight.w.size() != grid.nx)
    throw std::invalid_argument("fourier_loss_grid: weight built for a different mesh");
  if (grid.nx < 2 || grid.nt < 1)
    throw std::invalid_argument("fourier_loss_grid: degenerate mesh");

  const double lx = p.period(0);
  const double dt_span = p.t1 - p.t0;
  Tensor pts({grid.nt * grid.nx, 2});
  for (std::size_t i = 0; i < grid.nt; ++i) {
    const double ti =
        grid.nt == 1 ? p.t0 : p.t0 + dt_span * static_cast<double>(i) / double(grid.nt - 1);
    for (std::size_t j = 0; j < grid.nx; ++j) {
      pts.at2(i * grid.nx + j, 0) = p.xmin[0] + lx * static_cast<double>(j) / double(grid.nx);
      pts.at2(i * grid.nx + j, 1) = ti;
    }
  }

  auto jets = net.forward_jet(t, pts, p.mesh_jets, bound);
  const JetBundle& u = jets[0];

  // quadrature-weighted analysis transform per slice: (|Omega|/N) sum f e^{-2pi i ...}
  const double quad = lx / static_cast<double>(grid.nx);
  ComplexVar u_hat = cscale(t, dft_forward(t, u.value, grid.nt, grid.nx), quad);
  ComplexVar ut_hat = cscale(t, dft_forward(t, u.get(Deriv::T), grid.nt, grid.nx), quad);
  ComplexVar nl_hat =
      cscale(t, dft_forward(t, nonlinear_field(t, p, u), grid.nt, grid.nx), quad);

  // wavenumbers tiled over time slices
  WavenumberGrid wgrid = WavenumberGrid::regular({grid.nx}, {lx});
  Tensor xi({grid.nx});
  for (std::size_t j = 0; j < grid.nx; ++j) xi[j] = wgrid.xi[0][j];
  Tensor xi_tiled = tile_rows(xi, grid.nt);

  ComplexVar r_hat = spectral_residual_for(t, p, u_hat, ut_hat, nl_hat, xi_tiled);
  ComplexVar weighted =
      cmul_const(t, r_hat, tile_rows(weight.re_tensor(), grid.nt),
                 tile_rows(weight.im_tensor(), grid.nt));
  return reduce_weighted(t, weighted, q);
}

Var fourier_loss_mc(Tape& t, const PdeProblem& p, const JetNet& net, const McBatch& batch,
                    const SpectralWeight& weight, const QuantileSpec& q,
                    JetNet::Bound* bound) {
  const std::size_t slices = batch.proj.size();
  if (slices == 0 || batch.points.size() != slices)
    throw std::invalid_argument("fourier_loss_mc: empty or ragged batch");
  const std::size_t kmodes = batch.proj[0]->modes().size();
  if (weight.w.size() != kmodes)
    throw std::invalid_argument("fourier_loss_mc: weight/mode-set mismatch");

  // one batched forward over all slices
  const std::size_t per = batch.points[0].extent(0);
  const std::size_t dcols = batch.points[0].extent(1);
  Tensor pts({slices * per, dcols});
  for (std::size_t s = 0; s < slices; ++s) {
    if (batch.points[s].extent(0) != per)
      throw std::invalid_argument("fourier_loss_mc: slices must share the sample count");
    std::copy(batch.points[s].data(), batch.points[s].data() + per * dcols,
              pts.data() + s * per * dcols);
  }
  auto jets = net.forward_jet(t, pts, p.mesh_jets, bound);

  const Tensor wre = weight.re_tensor();
  const Tensor wim = weight.im_tensor();
  Var pooled_mag;       // quantile path
  Var sum_sq;           // mean path
  for (std::size_t s = 0; s < slices; ++s) {
    ComplexVar r_hat;
    if (p.kind == PdeKind::NavierStokes) {
      Var psi = t.slice_rows(jets[0].value, s * per, per);
      Var psi_t = t.slice_rows(jets[0].get(Deriv::T), s * per, per);
      r_hat = ns_mc_residual(t, psi, psi_t, batch.proj[s], p.nu);
    } else {
      Var u = t.slice_rows(jets[0].value, s * per, per);
      Var u_t = t.slice_rows(jets[0].get(Deriv::T), s * per, per);
      ComplexVar u_hat = mc_project(t, batch.proj[s], u);
      ComplexVar ut_hat = mc_project(t, batch.proj[s], u_t);
      Var nl;
      switch (p.kind) {
        case PdeKind::Burgers: nl = t.mul(u, u); break;
        case PdeKind::AllenCahn: nl = t.mul(t.mul(u, u), u); break;
        case PdeKind::Kdv: {
          Var ux = t.slice_rows(jets[0].get(Deriv::X), s * per, per);
          nl = t.mul(u, ux);
          break;
        }
        default: throw std::logic_error("fourier_loss_mc: unreachable");
      }
      ComplexVar nl_hat = mc_project(t, batch.proj[s], nl);
      Tensor xi({kmodes});
      for (std::size_t k = 0; k < kmodes; ++k) xi[k] = batch.proj[s]->modes()[k][0];
      r_hat = spectral_residual_for(t, p, u_hat, ut_hat, nl_hat, xi);
    }
    ComplexVar weighted = cmul_const(t, r_hat, wre, wim);
    if (q.enabled) {
      Var mags = cabs(t, weighted);
      pooled_mag = pooled_mag.valid() ? t.concat_cols(pooled_mag, mags) : mags;
    } else {
      Var ssq = t.sum(cabs2(t, weighted));
      sum_sq = sum_sq.valid() ? t.add(sum_sq, ssq) : ssq;
    }
  }
  if (q.enabled) return quantile_reduce(t, pooled_mag, q);
  return t.scale(sum_sq, 1.0 / static_cast<double>(slices * kmodes));
}

SpectralWeight weight_build_modes(const SpectralSymbol& symbol,
                                  const std::vector<std::vector<double>>& modes,
                                  std::optional<double> cutoff, WeightNorm norm) {
  constexpr double kEps = 1e-12;
  SpectralWeight sw;
  sw.symbol = symbol;
  sw.norm = norm;
  sw.cutoff = cutoff;
  sw.w.resize(modes.size());
  double max_abs = 0.0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    double r2 = 0.0;
    for (double x : modes[k]) r2 += x * x;
    const bool retained = !cutoff || std::sqrt(r2) <= *cutoff;
    sw.w[k] = retained ? symbol_eval_at(symbol, modes[k]) : std::complex<double>{0.0, 0.0};
    if (retained) max_abs = std::max(max_abs, std::abs(sw.w[k]));
  }
  if (max_abs == 0.0)
    throw std::invalid_argument("weight_build_modes: all retained weights are zero");
  if (norm == WeightNorm::Linf) {
    const double inv = 1.0 / (max_abs + kEps);
    for (auto& v : sw.w) v *= inv;
  }
  return sw;
}

std::vector<double> grad_norm_tune(const std::vector<double>& norms,
                                   const std::vector<double>& lambda_old, double alpha_ema) {
  if (norms.size() != lambda_old.size())
    throw std::invalid_argument("grad_norm_tune: size mismatch");
  double total = 0.0;
  bool any_positive = false;
  for (double n : norms) {
    if (!std::isfinite(n)) throw NumericalError("grad_norm_tune: non-finite gradient norm");
    total += n;
    any_positive |= n > 0.0;
  }
  if (!any_positive) throw std::invalid_argument("grad_norm_tune: all gradient norms zero");
  std::vector<double> out(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] == 0.0) {
      out[i] = lambda_old[i];  // frozen this step (division guard)
      continue;
    }
    const double hat = total / norms[i];
    out[i] = alpha_ema * hat + (1.0 - alpha_ema) * lambda_old[i];
  }
  return out;
}

Var combine_loss(Tape& t, const LossTerms& terms, const LossWeights& w, LossReport* report) {
  if (w.physics < 0 || w.boundary < 0 || w.fourier < 0 || w.compat < 0)
    throw std::invalid_argument("combine_loss: negative weight");
  if (w.physics == 0 && w.boundary == 0 && w.fourier == 0 && w.compat == 0)
    throw std::invalid_argument("combine_loss: every weight is zero");

  Var total;
  auto accumulate = [&](Var term, double lambda) {
    if (!term.valid() || lambda == 0.0) return;
    Var scaled = t.scale(term, lambda);
    total = total.valid() ? t.add(total, scaled) : scaled;
  };
  accumulate(terms.physics, w.physics);
  if (terms.initial.valid() && terms.boundary.valid())
    accumulate(t.add(terms.initial, terms.boundary), w.boundary);
  else if (terms.initial.valid())
    accumulate(terms.initial, w.boundary);
  else if (terms.boundary.valid())
    accumulate(terms.boundary, w.boundary);
  accumulate(terms.fourier, w.fourier);
  accumulate(terms.compat, w.compat);
  if (!total.valid()) throw std::invalid_argument("combine_loss: no active terms");

  if (report) {
    auto val = [&](Var v) { return v.valid() ? t.value(v).item() : 0.0; };
    report->physics = val(terms.physics);
    report->initial = val(terms.initial);
    report->boundary = val(terms.boundary);
    report->fourier = val(terms.fourier);
    report->compat = val(terms.compat);
    report->total = t.value(total).item();
  }
  return total;
}

}  // namespace fepinn
