#include "fepinn/tape.hpp"

#include <algorithm>
#include <cmath>

namespace fepinn {

void act_eval(ActKind act, int order, std::span<const double> z, std::span<double> out) {
  const std::size_t n = z.size();
  switch (act) {
    case ActKind::Sin:
      // d^k sin(z) = sin(z + k pi/2)
      switch (order & 3) {
        case 0:
          for (std::size_t i = 0; i < n; ++i) out[i] = std::sin(z[i]);
          break;
        case 1:
          for (std::size_t i = 0; i < n; ++i) out[i] = std::cos(z[i]);
          break;
        case 2:
          for (std::size_t i = 0; i < n; ++i) out[i] = -std::sin(z[i]);
          break;
        default:
          for (std::size_t i = 0; i < n; ++i) out[i] = -std::cos(z[i]);
          break;
      }
      break;
    case ActKind::Cos:
      // d^k cos(z) = cos(z + k pi/2)
      switch (order & 3) {
        case 0:
          for (std::size_t i = 0; i < n; ++i) out[i] = std::cos(z[i]);
          break;
        case 1:
          for (std::size_t i = 0; i < n; ++i) out[i] = -std::sin(z[i]);
          break;
        case 2:
          for (std::size_t i = 0; i < n; ++i) out[i] = -std::cos(z[i]);
          break;
        default:
          for (std::size_t i = 0; i < n; ++i) out[i] = std::sin(z[i]);
          break;
      }
      break;
    case ActKind::Tanh:
      for (std::size_t i = 0; i < n; ++i) {
        const double t = std::tanh(z[i]);
        const double s = 1.0 - t * t;  // sech^2
        switch (order) {
          case 0: out[i] = t; break;
          case 1: out[i] = s; break;
          case 2: out[i] = -2.0 * t * s; break;
          case 3: out[i] = s * (6.0 * t * t - 2.0); break;
          case 4: out[i] = t * s * (16.0 - 24.0 * t * t); break;
          default: throw std::logic_error("act_eval: tanh order > 4");
        }
      }
      break;
    case ActKind::Quadratic:
      for (std::size_t i = 0; i < n; ++i) {
        switch (order) {
          case 0: out[i] = z[i] * z[i]; break;
          case 1: out[i] = 2.0 * z[i]; break;
          case 2: out[i] = 2.0; break;
          default: out[i] = 0.0; break;
        }
      }
      break;
  }
}

Var Tape::push(Node n) {
  if (check_finite_ && !n.value.all_finite())
    throw NumericalError("non-finite value recorded on tape");
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tensor& Tape::grad(int id) {
  Node& n = nodes_[id];
  if (!n.seen) {
    n.adjoint = Tensor::zeros(n.value.shape());
    n.seen = true;
  }
  return n.adjoint;
}

const Tensor& Tape::adjoint(Var v) const {
  const Node& n = nodes_[check(v)];
  if (!n.seen) throw std::logic_error("Tape::adjoint before backward reached this node");
  return n.adjoint;
}

Tensor Tape::gradient(Var v) const {
  const Node& n = nodes_[check(v)];
  return n.seen ? n.adjoint : Tensor::zeros(n.value.shape());
}

void Tape::clear() {
  nodes_.clear();
}

Var Tape::leaf(Tensor v) {
  Node n;
  n.op = OpKind::Leaf;
  n.value = std::move(v);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const Tensor& va = nodes_[check(a)].value;
  const Tensor& vb = nodes_[check(b)].value;
  require_same_shape(va, vb, "add");
  Node n;
  n.op = OpKind::Add;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor(va.shape());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] + vb[i];
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Tensor& va = nodes_[check(a)].value;
  const Tensor& vb = nodes_[check(b)].value;
  require_same_shape(va, vb, "sub");
  Node n;
  n.op = OpKind::Sub;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor(va.shape());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] - vb[i];
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Tensor& va = nodes_[check(a)].value;
  const Tensor& vb = nodes_[check(b)].value;
  require_same_shape(va, vb, "mul");
  Node n;
  n.op = OpKind::Mul;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor(va.shape());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] * vb[i];
  return push(std::move(n));
}

Var Tape::neg(Var a) {
  const Tensor& va = nodes_[check(a)].value;
  Node n;
  n.op = OpKind::Neg;
  n.a = a.id;
  n.value = Tensor(va.shape());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = -va[i];
  return push(std::move(n));
}

Var Tape::scale(Var a, double c) {
  const Tensor& va = nodes_[check(a)].value;
  Node n;
  n.op = OpKind::Scale;
  n.a = a.id;
  n.c = c;
  n.value = Tensor(va.shape());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = c * va[i];
  return push(std::move(n));
}

Var Tape::add_scalar(Var a, double c) {
  const Tensor& va = nodes_[check(a)].value;
  Node n;
  n.op = OpKind::AddScalar;
  n.a = a.id;
  n.c = c;
  n.value = Tensor(va.shape());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] + c;
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& va = nodes_[check(a)].value;
  const Tensor& vb = nodes_[check(b)].value;
  if (va.rank() != 2 || vb.rank() != 2 || va.extent(1) != vb.extent(0))
    throw std::invalid_argument("matmul: incompatible shapes " + va.shape_str() + " * " +
                                vb.shape_str());
  const std::size_t m = va.extent(0), k = va.extent(1), p = vb.extent(1);
  Node n;
  n.op = OpKind::Matmul;
  n.a = a.id;
  n.b = b.id;
  n.value = Tensor({m, p});
  gemm_nn(va.data(), vb.data(), n.value.data(), m, k, p, false);
  return push(std::move(n));
}

Var Tape::bias_add(Var a, Var bias) {
  const Tensor& va = nodes_[check(a)].value;
  const Tensor& vb = nodes_[check(bias)].value;
  if (va.rank() != 2 || vb.size() != va.extent(1))
    throw std::invalid_argument("bias_add: shape mismatch " + va.shape_str() + " + " +
                                vb.shape_str());
  const std::size_t m = va.extent(0), p = va.extent(1);
  Node n;
  n.op = OpKind::BiasAdd;
  n.a = a.id;
  n.b = bias.id;
  n.value = Tensor({m, p});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < p; ++j) n.value[i * p + j] = va[i * p + j] + vb[j];
  return push(std::move(n));
}

Var Tape::act(Var a, ActKind kind, int order) {
  const Tensor& va = nodes_[check(a)].value;
  Node n;
  n.op = OpKind::Act;
  n.a = a.id;
  n.act = kind;
  n.k = order;
  n.value = Tensor(va.shape());
  act_eval(kind, order, va.span(), n.value.span());
  return push(std::move(n));
}

Var Tape::sqrt(Var a) {
  const Tensor& va = nodes_[check(a)].value;
  Node n;
  n.op = OpKind::Sqrt;
  n.a = a.id;
  n.value = Tensor(va.shape());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = std::sqrt(va[i]);
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  const Tensor& va = nodes_[check(a)].value;
  double s = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) s += va[i];
  Node n;
  n.op = OpKind::Sum;
  n.a = a.id;
  n.value = Tensor::scalar(s);
  return push(std::move(n));
}

Var Tape::mean(Var a) {
  const Tensor& va = nodes_[check(a)].value;
  double s = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) s += va[i];
  Node n;
  n.op = OpKind::Mean;
  n.a = a.id;
  n.c = 1.0 / static_cast<double>(va.size());
  n.value = Tensor::scalar(s * n.c);
  return push(std::move(n));
}

Var Tape::slice_rows(Var a, std::size_t row0, std::size_t nrows) {
  const Tensor& va = nodes_[check(a)].value;
  if (va.rank() != 2 || row0 + nrows > va.extent(0))
    throw std::invalid_argument("slice_rows: out of range on " + va.shape_str());
  const std::size_t p = va.extent(1);
  Node n;
  n.op = OpKind::SliceRows;
  n.a = a.id;
  n.k = static_cast<int>(row0);
  n.k2 = static_cast<int>(nrows);
  n.value = Tensor({nrows, p});
  std::copy(va.data() + row0 * p, va.data() + (row0 + nrows) * p, n.value.data());
  return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor& va = nodes_[check(a)].value;
  const Tensor& vb = nodes_[check(b)].value;
  // rank-1 vectors concatenate as single rows
  const std::size_t ra = va.rank() == 1 ? 1 : va.extent(0);
  const std::size_t rb = vb.rank() == 1 ? 1 : vb.extent(0);
  if (va.rank() > 2 || vb.rank() > 2 || ra != rb)
    throw std::invalid_argument("concat_cols: shape mismatch " + va.shape_str() + " | " +
                                vb.shape_str());
  const std::size_t m = ra;
  const std::size_t pa = va.size() / m, pb = vb.size() / m;
  Node n;
  n.op = OpKind::ConcatCols;
  n.a = a.id;
  n.b = b.id;
  n.k = static_cast<int>(pa);
  n.value = (va.rank() == 1 && vb.rank() == 1) ? Tensor({pa + pb}) : Tensor({m, pa + pb});
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(va.data() + i * pa, va.data() + (i + 1) * pa, n.value.data() + i * (pa + pb));
    std::copy(vb.data() + i * pb, vb.data() + (i + 1) * pb,
              n.value.data() + i * (pa + pb) + pa);
  }
  return push(std::move(n));
}

Var Tape::quantile_select(Var a, double tau) {
  const Tensor& va = nodes_[check(a)].value;
  if (va.size() == 0) throw std::invalid_argument("quantile_select: empty batch");
  if (!(tau > 0.0 && tau <= 1.0))
    throw std::invalid_argument("quantile_select: tau must lie in (0, 1]");
  const std::size_t m = va.size();
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(tau * static_cast<double>(m))) - 1;
  std::vector<std::pair<double, std::size_t>> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = {va[i], i};
  std::nth_element(order.begin(), order.begin() + rank, order.end());
  Node n;
  n.op = OpKind::QuantileSelect;
  n.a = a.id;
  n.k = static_cast<int>(order[rank].second);
  n.value = Tensor::scalar(order[rank].first);
  return push(std::move(n));
}

ComplexVar Tape::linear_op(std::shared_ptr<const LinearMap> op, Var in_re,
                           std::optional<Var> in_im) {
  const Tensor& vr = nodes_[check(in_re)].value;
  if (vr.size() != op->in_size())
    throw std::invalid_argument("linear_op: input length mismatch");
  std::vector<double> zero;
  std::span<const double> im_span;
  int im_id = -1;
  if (in_im) {
    const Tensor& vi = nodes_[check(*in_im)].value;
    require_same_shape(vr, vi, "linear_op");
    im_span = vi.span();
    im_id = in_im->id;
  } else {
    zero.assign(vr.size(), 0.0);
    im_span = zero;
  }
  Tensor out_re({op->out_size()});
  Tensor out_im({op->out_size()});
  op->apply(vr.span(), im_span, out_re.span(), out_im.span());

  Node nr;
  nr.op = OpKind::CLinear;
  nr.a = in_re.id;
  nr.b = im_id;
  nr.k = 0;  // real part
  nr.lin = op;
  nr.value = std::move(out_re);
  Var r = push(std::move(nr));

  Node ni;
  ni.op = OpKind::CLinear;
  ni.a = in_re.id;
  ni.b = im_id;
  ni.k = 1;  // imaginary part
  ni.lin = std::move(op);
  ni.value = std::move(out_im);
  Var i = push(std::move(ni));
  return {r, i};
}

Var Tape::linear_op_real(std::shared_ptr<const LinearMap> op, ComplexVar z) {
  const Tensor& vr = nodes_[check(z.re)].value;
  const Tensor& vi = nodes_[check(z.im)].value;
  require_same_shape(vr, vi, "linear_op_real");
  if (vr.size() != op->in_size())
    throw std::invalid_argument("linear_op_real: input length mismatch");
  Tensor out_re({op->out_size()});
  Tensor out_im({op->out_size()});
  op->apply(vr.span(), vi.span(), out_re.span(), out_im.span());
  Node n;
  n.op = OpKind::CLinearReal;
  n.a = z.re.id;
  n.b = z.im.id;
  n.lin = std::move(op);
  n.value = std::move(out_re);
  return push(std::move(n));
}

void Tape::backward(Var root) {
  const int rid = check(root);
  Node& r = nodes_[rid];
  if (r.value.size() != 1)
    throw std::logic_error("backward: root must be scalar, got " + r.value.shape_str());
  for (Node& n : nodes_) n.seen = false;
  grad(rid)[0] = 1.0;

  std::vector<double> scratch;
  for (int id = rid; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.seen || n.op == OpKind::Leaf) continue;
    const Tensor& g = n.adjoint;
    switch (n.op) {
      case OpKind::Add: {
        Tensor& ga = grad(n.a);
        Tensor& gb = grad(n.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case OpKind::Sub: {
        Tensor& ga = grad(n.a);
        Tensor& gb = grad(n.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
          gb[i] -= g[i];
        }
        break;
      }
      case OpKind::Mul: {
        const Tensor& va = nodes_[n.a].value;
        const Tensor& vb = nodes_[n.b].value;
        Tensor& ga = grad(n.a);
        Tensor& gb = grad(n.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * vb[i];
          gb[i] += g[i] * va[i];
        }
        break;
      }
      case OpKind::Neg: {
        Tensor& ga = grad(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i];
        break;
      }
      case OpKind::Scale: {
        Tensor& ga = grad(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += n.c * g[i];
        break;
      }
      case OpKind::AddScalar: {
        Tensor& ga = grad(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        break;
      }
      case OpKind::Matmul: {
        const Tensor& va = nodes_[n.a].value;
        const Tensor& vb = nodes_[n.b].value;
        const std::size_t m = va.extent(0), k = va.extent(1), p = vb.extent(1);
        gemm_nt(g.data(), vb.data(), grad(n.a).data(), m, p, k, true);
        gemm_tn(va.data(), g.data(), grad(n.b).data(), m, k, p, true);
        break;
      }
      case OpKind::BiasAdd: {
        const std::size_t m = n.value.extent(0), p = n.value.extent(1);
        Tensor& ga = grad(n.a);
        Tensor& gb = grad(n.b);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < p; ++j) {
            ga[i * p + j] += g[i * p + j];
            gb[j] += g[i * p + j];
          }
        break;
      }
      case OpKind::Act: {
        const Tensor& va = nodes_[n.a].value;
        scratch.resize(va.size());
        act_eval(n.act, n.k + 1, va.span(), scratch);
        Tensor& ga = grad(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * scratch[i];
        break;
      }
      case OpKind::Sqrt: {
        Tensor& ga = grad(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          // subgradient 0 at the origin
          if (n.value[i] > 0.0) ga[i] += 0.5 * g[i] / n.value[i];
        }
        break;
      }
      case OpKind::Sum: {
        Tensor& ga = grad(n.a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
        break;
      }
      case OpKind::Mean: {
        Tensor& ga = grad(n.a);
        const double s = g[0] * n.c;
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += s;
        break;
      }
      case OpKind::SliceRows: {
        const std::size_t p = n.value.extent(1);
        Tensor& ga = grad(n.a);
        const std::size_t off = static_cast<std::size_t>(n.k) * p;
        for (std::size_t i = 0; i < g.size(); ++i) ga[off + i] += g[i];
        break;
      }
      case OpKind::ConcatCols: {
        const std::size_t pa = static_cast<std::size_t>(n.k);
        const std::size_t m = nodes_[n.a].value.size() / pa;
        const std::size_t p = n.value.size() / m;
        const std::size_t pb = p - pa;
        Tensor& ga = grad(n.a);
        Tensor& gb = grad(n.b);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < pa; ++j) ga[i * pa + j] += g[i * p + j];
          for (std::size_t j = 0; j < pb; ++j) gb[i * pb + j] += g[i * p + pa + j];
        }
        break;
      }
      case OpKind::QuantileSelect: {
        grad(n.a)[static_cast<std::size_t>(n.k)] += g[0];
        break;
      }
      case OpKind::CLinear: {
        // node holds one part of w = op(z); seed the adjoint transform with
        // g (real part node) or i*g (imaginary part node)
        const std::size_t in = n.lin->in_size();
        const std::size_t out = n.lin->out_size();
        std::vector<double> sr(out, 0.0), si(out, 0.0), tr(in), ti(in);
        if (n.k == 0)
          std::copy(g.data(), g.data() + out, sr.begin());
        else
          std::copy(g.data(), g.data() + out, si.begin());
        n.lin->apply_adjoint(sr, si, tr, ti);
        Tensor& ga = grad(n.a);
        for (std::size_t i = 0; i < in; ++i) ga[i] += tr[i];
        if (n.b >= 0) {
          Tensor& gb = grad(n.b);
          for (std::size_t i = 0; i < in; ++i) gb[i] += ti[i];
        }
        break;
      }
      case OpKind::CLinearReal: {
        const std::size_t in = n.lin->in_size();
        const std::size_t out = n.lin->out_size();
        std::vector<double> si(out, 0.0), tr(in), ti(in);
        n.lin->apply_adjoint(g.span(), si, tr, ti);
        Tensor& ga = grad(n.a);
        Tensor& gb = grad(n.b);
        for (std::size_t i = 0; i < in; ++i) {
          ga[i] += tr[i];
          gb[i] += ti[i];
        }
        break;
      }
      case OpKind::Leaf:
        break;
    }
  }
}

ComplexVar cadd(Tape& t, ComplexVar a, ComplexVar b) {
  return {t.add(a.re, b.re), t.add(a.im, b.im)};
}

ComplexVar csub(Tape& t, ComplexVar a, ComplexVar b) {
  return {t.sub(a.re, b.re), t.sub(a.im, b.im)};
}

ComplexVar cscale(Tape& t, ComplexVar a, double c) {
  return {t.scale(a.re, c), t.scale(a.im, c)};
}

ComplexVar cmul_const(Tape& t, ComplexVar a, const Tensor& wr, const Tensor& wi) {
  Var cr = t.leaf(wr);
  Var ci = t.leaf(wi);
  // (re + i im)(wr + i wi) = (re*wr - im*wi) + i(re*wi + im*wr)
  Var out_re = t.sub(t.mul(a.re, cr), t.mul(a.im, ci));
  Var out_im = t.add(t.mul(a.re, ci), t.mul(a.im, cr));
  return {out_re, out_im};
}

Var cabs2(Tape& t, ComplexVar a) {
  return t.add(t.mul(a.re, a.re), t.mul(a.im, a.im));
}

Var cabs(Tape& t, ComplexVar a) { return t.sqrt(cabs2(t, a)); }

}  // namespace fepinn
