#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fepinn/tensor.hpp"

namespace fepinn {

/// Raised when a value leaves the finite range (NaN/Inf) or a numerical
/// contract is violated at run time. The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OpKind : std::uint8_t {
  Leaf,
  Add,
  Sub,
  Mul,
  Neg,
  Scale,      // c * a
  AddScalar,  // a + c
  Matmul,     // a (m x k) * b (k x n)
  BiasAdd,    // a (m x n) + row b (n)
  Act,        // sigma^(order)(a) elementwise
  Sqrt,
  Sum,
  Mean,
  SliceRows,
  ConcatCols,
  QuantileSelect,
  CLinear,  // custom complex-linear operator (DFT, MC projection)
  CLinearReal,  // real part of a complex-linear operator on a complex pair
};

enum class ActKind : std::uint8_t { Sin, Cos, Tanh, Quadratic };

/// Elementwise evaluation of the activation's derivative of a given order
/// (order 0 is the activation itself; orders up to 4 are used by backward).
void act_eval(ActKind act, int order, std::span<const double> z, std::span<double> out);

/// Complex-linear operator with an explicit adjoint (conjugate-transpose)
/// action. Registering one of these is how the DFT and the Monte-Carlo
/// projection participate in reverse mode.
class LinearMap {
public:
  virtual ~LinearMap() = default;
  virtual std::size_t in_size() const = 0;
  virtual std::size_t out_size() const = 0;
  virtual void apply(std::span<const double> in_re, std::span<const double> in_im,
                     std::span<double> out_re, std::span<double> out_im) const = 0;
  virtual void apply_adjoint(std::span<const double> in_re, std::span<const double> in_im,
                             std::span<double> out_re, std::span<double> out_im) const = 0;
};

/// Handle to a node on a tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// (re, im) node pair standing in for a complex tensor.
struct ComplexVar {
  Var re, im;
};

struct Node {
  OpKind op = OpKind::Leaf;
  int a = -1, b = -1;
  double c = 0.0;   // scalar payload
  int k = 0;        // small integer payload (act order, slice offset, selected index, part)
  int k2 = 0;       // second integer payload (slice rows)
  ActKind act = ActKind::Tanh;
  std::shared_ptr<const LinearMap> lin;
  Tensor value;
  Tensor adjoint;
  bool seen = false;  // adjoint touched during the current backward pass
};

/// Append-only reverse-mode tape. Cleared between training steps; parents
/// always precede their consumers. Single-threaded by construction.
class Tape {
public:
  Var leaf(Tensor v);
  Var constant(double v) { return leaf(Tensor::scalar(v)); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var neg(Var a);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var matmul(Var a, Var b);
  Var bias_add(Var a, Var bias);
  Var act(Var a, ActKind kind, int order = 0);
  Var sqrt(Var a);
  Var sum(Var a);
  Var mean(Var a);
  Var slice_rows(Var a, std::size_t row0, std::size_t nrows);
  Var concat_cols(Var a, Var b);

  /// Lower empirical tau-quantile of the entries of `a` (order statistic at
  /// index ceil(tau*n)-1, ties broken by position). Backward routes the whole
  /// adjoint to the selected entry.
  Var quantile_select(Var a, double tau);

  /// out = op(in) for a complex-linear op; input either real (im absent) or a
  /// complex pair. Forward runs once; the pair of result nodes shares it.
  ComplexVar linear_op(std::shared_ptr<const LinearMap> op, Var in_re,
                       std::optional<Var> in_im = std::nullopt);

  /// out = Re(op(z)) for a complex pair z.
  Var linear_op_real(std::shared_ptr<const LinearMap> op, ComplexVar z);

  void backward(Var root);

  const Tensor& value(Var v) const { return nodes_[check(v)].value; }
  const Tensor& adjoint(Var v) const;
  bool has_adjoint(Var v) const { return nodes_[check(v)].seen; }
  /// adjoint after backward, or zeros when the node was never reached (its
  /// gradient is genuinely zero)
  Tensor gradient(Var v) const;

  std::size_t size() const { return nodes_.size(); }
  void clear();

  /// When set, every recorded value is checked for NaN/Inf (test aid).
  void set_check_finite(bool on) { check_finite_ = on; }

private:
  int check(Var v) const {
    if (!v.valid() || v.id >= static_cast<int>(nodes_.size()))
      throw std::logic_error("Tape: dangling Var");
    return v.id;
  }
  Var push(Node n);
  Tensor& grad(int id);

  std::vector<Node> nodes_;
  bool check_finite_ = false;
};

// ---- complex pair helpers (thin compositions of tape ops) ----

ComplexVar cadd(Tape& t, ComplexVar a, ComplexVar b);
ComplexVar csub(Tape& t, ComplexVar a, ComplexVar b);
ComplexVar cscale(Tape& t, ComplexVar a, double c);
/// multiply by a constant complex field (same shape as the pair)
ComplexVar cmul_const(Tape& t, ComplexVar a, const Tensor& wr, const Tensor& wi);
/// |z|^2 elementwise
Var cabs2(Tape& t, ComplexVar a);
/// |z| elementwise (subgradient 0 at z = 0)
Var cabs(Tape& t, ComplexVar a);

}  // namespace fepinn
