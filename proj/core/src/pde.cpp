#include "fepinn/pde.hpp"

#include <cmath>
#include <stdexcept>

#include "fepinn/fft.hpp"

namespace fepinn {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

double PdeProblem::volume() const {
  double v = 1.0;
  for (std::size_t d = 0; d < xmin.size(); ++d) v *= xmax[d] - xmin[d];
  return v;
}

double PdeProblem::initial_value(std::span<const double> x) const {
  switch (kind) {
    case PdeKind::Burgers:
      return -std::sin(kPi * x[0]);
    case PdeKind::AllenCahn:
      return x[0] * x[0] * std::cos(kPi * x[0]);
    case PdeKind::Kdv:
      return -kdv_ic_alpha * std::cos(kPi * x[0]);
    case PdeKind::NavierStokes:
      throw std::logic_error("Navier-Stokes initial data comes from the reference solver");
  }
  return 0.0;
}

PdeProblem make_burgers(double nu) {
  PdeProblem p;
  p.kind = PdeKind::Burgers;
  p.name = "burgers";
  p.spatial_dims = 1;
  p.xmin = {-1.0};
  p.xmax = {1.0};
  p.t0 = 0.0;
  p.t1 = 1.0;
  p.nu = nu;
  p.physics_jets = JetSpec{1, 2, true, false, false};
  p.mesh_jets = JetSpec{1, 0, true, false, false};
  return p;
}

PdeProblem make_allen_cahn(double alpha) {
  PdeProblem p;
  p.kind = PdeKind::AllenCahn;
  p.name = "allen_cahn";
  p.spatial_dims = 1;
  p.xmin = {-1.0};
  p.xmax = {1.0};
  p.t0 = 0.0;
  p.t1 = 1.0;
  p.alpha = alpha;
  p.physics_jets = JetSpec{1, 2, true, false, false};
  p.mesh_jets = JetSpec{1, 0, true, false, false};
  return p;
}

PdeProblem make_kdv(double delta2, double ic_alpha) {
  PdeProblem p;
  p.kind = PdeKind::Kdv;
  p.name = "kdv";
  p.spatial_dims = 1;
  p.xmin = {0.0};
  p.xmax = {2.0};
  p.t0 = 0.0;
  p.t1 = 1.0;
  p.delta2 = delta2;
  p.kdv_ic_alpha = ic_alpha;
  p.physics_jets = JetSpec{1, 3, true, false, false};
  p.mesh_jets = JetSpec{1, 1, true, false, false};  // (u u_x)^ needs u_x on the mesh
  return p;
}

PdeProblem make_navier_stokes(double nu) {
  PdeProblem p;
  p.kind = PdeKind::NavierStokes;
  p.name = "navier_stokes";
  p.spatial_dims = 2;
  p.xmin = {-kTwoPi, -kTwoPi};
  p.xmax = {kTwoPi, kTwoPi};
  p.t0 = 0.5;
  p.t1 = 1.5;
  p.nu = nu;
  p.physics_jets = JetSpec{2, 2, true, true, false};
  p.mesh_jets = JetSpec{2, 0, true, false, false};
  return p;
}

PdeProblem make_problem(const std::string& name) {
  if (name == "burgers") return make_burgers(0.01 / kPi);
  if (name == "allen_cahn") return make_allen_cahn(1e-4);
  if (name == "kdv") return make_kdv(0.0025);
  if (name == "navier_stokes") return make_navier_stokes(0.01);
  throw std::invalid_argument("unknown pde: " + name);
}

Var physical_residual(Tape& t, const PdeProblem& p, const std::vector<JetBundle>& out) {
  switch (p.kind) {
    case PdeKind::Burgers: {
      const JetBundle& u = out.at(0);
      Var adv = t.mul(u.value, u.get(Deriv::X));
      return t.sub(t.add(u.get(Deriv::T), adv), t.scale(u.get(Deriv::XX), p.nu));
    }
    case PdeKind::AllenCahn: {
      const JetBundle& u = out.at(0);
      Var cubic = t.mul(t.mul(u.value, u.value), u.value);
      Var r = t.sub(u.get(Deriv::T), t.scale(u.get(Deriv::XX), p.alpha));
      r = t.add(r, t.scale(cubic, 5.0));
      return t.sub(r, t.scale(u.value, 5.0));
    }
    case PdeKind::Kdv: {
      const JetBundle& u = out.at(0);
      Var adv = t.mul(u.value, u.get(Deriv::X));
      return t.add(t.add(u.get(Deriv::T), adv), t.scale(u.get(Deriv::XXX), p.delta2));
    }
    case PdeKind::NavierStokes: {
      const JetBundle& psi = out.at(0);
      const JetBundle& w = out.at(1);
      Var adv = t.sub(t.mul(psi.get(Deriv::Y), w.get(Deriv::X)),
                      t.mul(psi.get(Deriv::X), w.get(Deriv::Y)));
      Var lap = t.add(w.get(Deriv::XX), w.get(Deriv::YY));
      return t.sub(t.add(w.get(Deriv::T), adv), t.scale(lap, p.nu));
    }
  }
  throw std::logic_error("physical_residual: unreachable");
}

Var ns_compatibility_residual(Tape& t, const std::vector<JetBundle>& out) {
  const JetBundle& psi = out.at(0);
  const JetBundle& w = out.at(1);
  return t.add(w.value, t.add(psi.get(Deriv::XX), psi.get(Deriv::YY)));
}

namespace {

// constant multiplier tensors for a per-entry wavenumber vector
Tensor map_xi(const Tensor& xi, double (*f)(double)) {
  Tensor out(xi.shape());
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = f(xi[i]);
  return out;
}

}  // namespace

ComplexVar burgers_spectral_residual(Tape& t, ComplexVar u_hat, ComplexVar ut_hat,
                                     ComplexVar u2_hat, const Tensor& xi, double nu) {
  // pi i xi * u2^
  Tensor zero = Tensor::zeros(xi.shape());
  Tensor pi_xi = map_xi(xi, [](double x) { return kPi * x; });
  ComplexVar nl = cmul_const(t, u2_hat, zero, pi_xi);
  // 4 pi^2 nu xi^2 * u^
  Tensor diff(xi.shape());
  for (std::size_t i = 0; i < xi.size(); ++i) diff[i] = 4.0 * kPi * kPi * nu * xi[i] * xi[i];
  ComplexVar visc = cmul_const(t, u_hat, diff, zero);
  return cadd(t, cadd(t, ut_hat, nl), visc);
}

ComplexVar allen_cahn_spectral_residual(Tape& t, ComplexVar u_hat, ComplexVar ut_hat,
                                        ComplexVar u3_hat, const Tensor& xi, double alpha) {
  Tensor zero = Tensor::zeros(xi.shape());
  Tensor mult(xi.shape());
  for (std::size_t i = 0; i < xi.size(); ++i)
    mult[i] = 4.0 * kPi * kPi * alpha * xi[i] * xi[i] - 5.0;
  // (4 pi^2 alpha xi^2 - 5) u^  +  5 u3^
  ComplexVar lin = cmul_const(t, u_hat, mult, zero);
  return cadd(t, cadd(t, ut_hat, lin), cscale(t, u3_hat, 5.0));
}

ComplexVar kdv_spectral_residual(Tape& t, ComplexVar u_hat, ComplexVar ut_hat,
                                 ComplexVar uux_hat, const Tensor& xi, double delta2) {
  Tensor zero = Tensor::zeros(xi.shape());
  Tensor disp(xi.shape());
  for (std::size_t i = 0; i < xi.size(); ++i)
    disp[i] = -8.0 * kPi * kPi * kPi * delta2 * xi[i] * xi[i] * xi[i];
  ComplexVar lin = cmul_const(t, u_hat, zero, disp);
  return cadd(t, cadd(t, ut_hat, uux_hat), lin);
}

ComplexVar ns_mc_residual(Tape& t, Var psi, Var psi_t,
                          const std::shared_ptr<const McProjection>& proj, double nu) {
  const auto& modes = proj->modes();
  if (modes.empty() || modes[0].size() != 2)
    throw std::invalid_argument("ns_mc_residual: projection must carry 2-D modes");
  const std::size_t K = modes.size();
  const double s = proj->scale();
  const double coef = 1.0 / (s * static_cast<double>(proj->samples()));

  Tensor zero = Tensor::zeros({K});
  Tensor m({K}), two_pi_x({K}), two_pi_y({K});
  for (std::size_t k = 0; k < K; ++k) {
    const double xx = modes[k][0], yy = modes[k][1];
    m[k] = 4.0 * kPi * kPi * (xx * xx + yy * yy);
    two_pi_x[k] = kTwoPi * xx;
    two_pi_y[k] = kTwoPi * yy;
  }

  // stream-function coefficients and their time derivative
  ComplexVar psi_hat = cscale(t, mc_project(t, proj, psi), coef);
  ComplexVar psit_hat = cscale(t, mc_project(t, proj, psi_t), coef);
  ComplexVar w_hat = cmul_const(t, psi_hat, m, zero);       // omega^ = 4 pi^2 |xi|^2 psi^
  ComplexVar wdot_hat = cmul_const(t, psit_hat, m, zero);

  ComplexVar u_hat = cmul_const(t, psi_hat, zero, two_pi_y);   // d/dy
  ComplexVar v_hat = cmul_const(t, cscale(t, psi_hat, -1.0), zero, two_pi_x);  // -d/dx
  ComplexVar wx_hat = cmul_const(t, w_hat, zero, two_pi_x);
  ComplexVar wy_hat = cmul_const(t, w_hat, zero, two_pi_y);

  // pointwise reconstruction at the sample locations via the adjoint
  auto adj = std::make_shared<AdjointMap>(proj);
  const double rescale = 1.0 / s;
  Var u = t.scale(t.linear_op_real(adj, u_hat), rescale);
  Var v = t.scale(t.linear_op_real(adj, v_hat), rescale);
  Var wx = t.scale(t.linear_op_real(adj, wx_hat), rescale);
  Var wy = t.scale(t.linear_op_real(adj, wy_hat), rescale);
  Var advection = t.add(t.mul(u, wx), t.mul(v, wy));

  ComplexVar adv_hat = cscale(t, mc_project(t, proj, advection), coef);
  ComplexVar visc = cmul_const(t, cscale(t, w_hat, nu), m, zero);
  // R^ = omega_t^ + advection^ + nu * 4 pi^2 |xi|^2 omega^
  return cadd(t, cadd(t, wdot_hat, adv_hat), visc);
}

Tensor ns_initial_condition(Rng& rng, std::size_t n, double domain_period) {
  if (n < 2) throw std::invalid_argument("ns_initial_condition: grid too small");
  const std::size_t total = n * n;
  std::vector<double> sre(total), sim(total);
  // coefficient spectrum: (zeta + i eta) S(r) 1_{r <= 4} with the wavenumber
  // measured as 2 pi k / L
  for (std::size_t ky = 0; ky < n; ++ky)
    for (std::size_t kx = 0; kx < n; ++kx) {
      const double zeta = rng.normal();
      const double eta = rng.normal();
      const double sy = static_cast<double>(signed_mode(ky, n));
      const double sx = static_cast<double>(signed_mode(kx, n));
      const double r = kTwoPi * std::sqrt(sx * sx + sy * sy) / domain_period;
      double S = 0.0;
      if (r <= 4.0) S = r / (1.0 + std::pow(r / 4.0, 4.0));
      sre[ky * n + kx] = zeta * S;
      sim[ky * n + kx] = eta * S;
    }
  // Hermitian symmetrization: c(k) <- (c(k) + conj(c(-k))) / 2
  std::vector<double> hre(total), him(total);
  for (std::size_t ky = 0; ky < n; ++ky)
    for (std::size_t kx = 0; kx < n; ++kx) {
      const std::size_t my = (n - ky) % n, mx = (n - kx) % n;
      hre[ky * n + kx] = 0.5 * (sre[ky * n + kx] + sre[my * n + mx]);
      him[ky * n + kx] = 0.5 * (sim[ky * n + kx] - sim[my * n + mx]);
    }
  // synthesis: field = sum_k c_k e^{+2 pi i <k,x>/L} = unnormalized +1 transform
  dft_2d(hre, him, n, n, +1);
  Tensor field({n, n});
  double rms = 0.0, max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    field[i] = hre[i];
    rms += hre[i] * hre[i];
    max_re = std::max(max_re, std::abs(hre[i]));
    max_im = std::max(max_im, std::abs(him[i]));
  }
  if (max_im > 1e-9 * std::max(max_re, 1.0))
    throw NumericalError("ns_initial_condition: synthesis produced a non-real field");
  rms = std::sqrt(rms / static_cast<double>(total));
  if (rms > 0.0)
    for (std::size_t i = 0; i < total; ++i) field[i] /= rms;
  return field;
}

}  // namespace fepinn
