#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "fepinn/tape.hpp"

namespace fepinn {

/// Input-derivative slots carried through a network forward pass. X/Y are
/// spatial coordinates, T is time; XT is the space-time mixed slot used by
/// diagnostics that differentiate the residual in physical space.
enum class Deriv : std::uint8_t { T, X, Y, XX, YY, XY, XT, XXX, Count };

constexpr std::size_t kDerivCount = static_cast<std::size_t>(Deriv::Count);

/// Which derivative slots a forward pass must produce.
struct JetSpec {
  int spatial_dims = 1;          // 1 or 2
  int max_spatial_order = 2;     // <= 3 in 1-D, <= 2 in 2-D
  bool time_first = true;        // carry d/dt
  bool mixed = false;            // XY (2-D only)
  bool mixed_space_time = false; // XT (1-D diagnostics)

  bool wants(Deriv d) const;
  void validate() const;
};

/// A value batch together with its active input-derivative batches, all of
/// them tape nodes of identical shape.
struct JetBundle {
  Var value;
  std::array<Var, kDerivCount> comp{};
  std::array<bool, kDerivCount> active{};

  Var get(Deriv d) const {
    if (!active[static_cast<std::size_t>(d)])
      throw std::logic_error("JetBundle: inactive derivative slot requested");
    return comp[static_cast<std::size_t>(d)];
  }
  bool has(Deriv d) const { return active[static_cast<std::size_t>(d)]; }
  void set(Deriv d, Var v) {
    comp[static_cast<std::size_t>(d)] = v;
    active[static_cast<std::size_t>(d)] = true;
  }
};

// Jet arithmetic. Shapes follow the tape ops; derivative slots propagate by
// linearity, the Leibniz rule, and Faa di Bruno up to the orders above.
JetBundle jet_add(Tape& t, const JetBundle& a, const JetBundle& b);
JetBundle jet_sub(Tape& t, const JetBundle& a, const JetBundle& b);
JetBundle jet_scale(Tape& t, const JetBundle& a, double c);
JetBundle jet_mul(Tape& t, const JetBundle& a, const JetBundle& b);
/// h = a W + bias on the value; derivative slots are multiplied by W only.
JetBundle jet_affine(Tape& t, const JetBundle& a, Var weight, Var bias);
JetBundle jet_act(Tape& t, const JetBundle& a, ActKind act);
/// constant (derivative-free) bundle matching the slot set of `like`
JetBundle jet_const_like(Tape& t, const JetBundle& like, Var value);

}  // namespace fepinn
