#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fepinn/jet.hpp"
#include "fepinn/rng.hpp"
#include "fepinn/spectral.hpp"
#include "fepinn/tape.hpp"

namespace fepinn {

enum class PdeKind { Burgers, AllenCahn, Kdv, NavierStokes };

/// One PDE: domain, coefficients, initial data, the jet orders its physical
/// residual consumes, and the mesh fields its spectral residual consumes.
struct PdeProblem {
  PdeKind kind;
  std::string name;
  int spatial_dims = 1;
  std::vector<double> xmin, xmax;  // per spatial dimension
  double t0 = 0.0, t1 = 1.0;
  double nu = 0.0;      // Burgers / Navier-Stokes viscosity
  double alpha = 0.0;   // Allen-Cahn diffusion
  double delta2 = 0.0;  // KdV dispersion
  double kdv_ic_alpha = 1.0;

  JetSpec physics_jets;  // orders the pointwise residual needs
  JetSpec mesh_jets;     // orders the Fourier-loss mesh evaluation needs

  double period(std::size_t d) const { return xmax[d] - xmin[d]; }
  double volume() const;

  /// u(x, 0) for the scalar problems (Navier-Stokes initial data comes from
  /// the reference solver instead).
  double initial_value(std::span<const double> x) const;
};

PdeProblem make_burgers(double nu);
PdeProblem make_allen_cahn(double alpha);
PdeProblem make_kdv(double delta2, double ic_alpha = 1.0);
PdeProblem make_navier_stokes(double nu);
PdeProblem make_problem(const std::string& name);  // named defaults

/// Pointwise residual of the PDE applied to network jets. The scalar
/// problems consume `out[0]`; Navier-Stokes consumes (psi, omega) = (out[0],
/// out[1]).
Var physical_residual(Tape& t, const PdeProblem& p, const std::vector<JetBundle>& out);

/// Navier-Stokes stream/vorticity compatibility defect omega + laplace(psi).
Var ns_compatibility_residual(Tape& t, const std::vector<JetBundle>& out);

// Spectral residuals R^(xi, t). Inputs are stacked (slices x modes); xi holds
// the per-entry wavenumber (already tiled across slices).

/// R^ = u_t^ + pi i xi u2^ + 4 pi^2 nu xi^2 u^
ComplexVar burgers_spectral_residual(Tape& t, ComplexVar u_hat, ComplexVar ut_hat,
                                     ComplexVar u2_hat, const Tensor& xi, double nu);

/// R^ = u_t^ + 4 pi^2 alpha xi^2 u^ + 5 u3^ - 5 u^
ComplexVar allen_cahn_spectral_residual(Tape& t, ComplexVar u_hat, ComplexVar ut_hat,
                                        ComplexVar u3_hat, const Tensor& xi, double alpha);

/// R^ = u_t^ + (u u_x)^ - 8 pi^3 delta^2 i xi^3 u^
ComplexVar kdv_spectral_residual(Tape& t, ComplexVar u_hat, ComplexVar ut_hat,
                                 ComplexVar uux_hat, const Tensor& xi, double delta2);

/// Monte-Carlo Navier-Stokes residual per mode from psi samples and their
/// time derivatives: psi^ = proj(psi), omega^ = 4 pi^2 |xi|^2 psi^, velocities
/// and vorticity gradients reconstructed through the adjoint, advection
/// projected pointwise. `proj` must carry 2-D modes.
ComplexVar ns_mc_residual(Tape& t, Var psi, Var psi_t,
                          const std::shared_ptr<const McProjection>& proj, double nu);

/// Appendix-style filtered white-noise vorticity on an n x n grid covering
/// the Navier-Stokes box: spectrum (zeta + i eta) S(|xi|) 1_{|xi| <= 4},
/// S(r) = r / (1 + (r/4)^4), Hermitian-symmetrized so the field is real,
/// zero mean.
Tensor ns_initial_condition(Rng& rng, std::size_t n, double domain_period);

}  // namespace fepinn
