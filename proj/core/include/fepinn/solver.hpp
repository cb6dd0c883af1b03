#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fepinn/pde.hpp"
#include "fepinn/tensor.hpp"

namespace fepinn {

/// Reference solution on a uniform space(-space)-time grid, row-major
/// [time][x] or [time][y][x].
struct SolutionGrid {
  std::string pde;
  std::vector<std::size_t> space_shape;
  std::vector<double> xmin, xmax;
  std::vector<double> times;
  std::vector<double> values;
  std::map<std::string, double> coeffs;
  double dt = 0.0;
  std::uint64_t seed = 0;

  std::size_t space_size() const;
  std::span<const double> slice(std::size_t i) const;
  /// restriction onto a coarser uniform mesh; extents must divide evenly
  SolutionGrid downsample_space(std::size_t factor) const;
};

struct SolveOptions {
  std::size_t resolution = 512;
  double dt = 1e-4;
  std::size_t save_slices = 101;
  // test hooks for linearized / advection-free runs
  bool disable_nonlinear = false;
  std::function<double(double)> initial_override;
};

/// Pseudo-spectral solve of a 1-D problem: exact integrating factor on the
/// stiff linear symbol, RK4 on the (2x zero-padded, alias-free) nonlinear
/// term, periodic box. Aborts with a diagnostic when ||u||_inf passes 1e6.
SolutionGrid solve(const PdeProblem& p, const SolveOptions& opt);

struct NsSolveOptions {
  std::size_t resolution = 128;
  double dt = 5e-4;
  std::size_t save_slices = 21;
  double save_t0 = 0.5, save_t1 = 1.5;
  bool disable_advection = false;
  std::uint64_t seed = 0;
};

/// 2-D vorticity-stream solve from an initial vorticity field (defaults to
/// the filtered white-noise draw when `omega0` is empty); returns vorticity
/// slices over the save window.
SolutionGrid ns_solve(const PdeProblem& p, const Tensor& omega0, const NsSolveOptions& opt);

/// Spectral-accuracy gate: solves at `resolution` and at twice it, returns
/// the max abs difference restricted to the coarse mesh.
double resolution_doubling_gap(const PdeProblem& p, const SolveOptions& opt);

}  // namespace fepinn
