#include "fepinn/jet.hpp"

namespace fepinn {

bool JetSpec::wants(Deriv d) const {
  switch (d) {
    case Deriv::T: return time_first;
    case Deriv::X: return max_spatial_order >= 1;
    case Deriv::Y: return spatial_dims == 2 && max_spatial_order >= 1;
    case Deriv::XX: return max_spatial_order >= 2;
    case Deriv::YY: return spatial_dims == 2 && max_spatial_order >= 2;
    case Deriv::XY: return spatial_dims == 2 && mixed;
    case Deriv::XT: return spatial_dims == 1 && mixed_space_time;
    case Deriv::XXX: return spatial_dims == 1 && max_spatial_order >= 3;
    default: return false;
  }
}

void JetSpec::validate() const {
  if (spatial_dims != 1 && spatial_dims != 2)
    throw std::invalid_argument("JetSpec: spatial_dims must be 1 or 2");
  if (spatial_dims == 1 && max_spatial_order > 3)
    throw std::invalid_argument("JetSpec: 1-D spatial order capped at 3");
  if (spatial_dims == 2 && max_spatial_order > 2)
    throw std::invalid_argument("JetSpec: 2-D spatial order capped at 2 (unsupported order)");
  if (mixed && spatial_dims != 2)
    throw std::invalid_argument("JetSpec: mixed XY requires 2 spatial dims");
  if (max_spatial_order < 0)
    throw std::invalid_argument("JetSpec: negative order");
}

namespace {

template <typename F>
void for_active_pair(const JetBundle& a, const JetBundle& b, F&& f) {
  for (std::size_t i = 0; i < kDerivCount; ++i) {
    if (a.active[i] != b.active[i])
      throw std::logic_error("jet op: mismatched derivative slot sets");
    if (a.active[i]) f(static_cast<Deriv>(i));
  }
}

}  // namespace

JetBundle jet_add(Tape& t, const JetBundle& a, const JetBundle& b) {
  JetBundle r;
  r.value = t.add(a.value, b.value);
  for_active_pair(a, b, [&](Deriv d) { r.set(d, t.add(a.get(d), b.get(d))); });
  return r;
}

JetBundle jet_sub(Tape& t, const JetBundle& a, const JetBundle& b) {
  JetBundle r;
  r.value = t.sub(a.value, b.value);
  for_active_pair(a, b, [&](Deriv d) { r.set(d, t.sub(a.get(d), b.get(d))); });
  return r;
}

JetBundle jet_scale(Tape& t, const JetBundle& a, double c) {
  JetBundle r;
  r.value = t.scale(a.value, c);
  for (std::size_t i = 0; i < kDerivCount; ++i)
    if (a.active[i]) r.set(static_cast<Deriv>(i), t.scale(a.comp[i], c));
  return r;
}

JetBundle jet_mul(Tape& t, const JetBundle& a, const JetBundle& b) {
  JetBundle r;
  r.value = t.mul(a.value, b.value);
  auto term = [&](Var u, Var v) { return t.mul(u, v); };
  auto D = [&](const JetBundle& j, Deriv d) { return j.get(d); };

  for_active_pair(a, b, [&](Deriv d) {
    switch (d) {
      case Deriv::T:
      case Deriv::X:
      case Deriv::Y: {
        // (fg)_i = f_i g + f g_i
        r.set(d, t.add(term(D(a, d), b.value), term(a.value, D(b, d))));
        break;
      }
      case Deriv::XX:
      case Deriv::YY: {
        const Deriv d1 = (d == Deriv::XX) ? Deriv::X : Deriv::Y;
        Var s = t.add(term(D(a, d), b.value), term(a.value, D(b, d)));
        s = t.add(s, t.scale(term(D(a, d1), D(b, d1)), 2.0));
        r.set(d, s);
        break;
      }
      case Deriv::XY:
      case Deriv::XT: {
        const Deriv di = Deriv::X;
        const Deriv dj = (d == Deriv::XY) ? Deriv::Y : Deriv::T;
        Var s = t.add(term(D(a, d), b.value), term(a.value, D(b, d)));
        s = t.add(s, t.add(term(D(a, di), D(b, dj)), term(D(a, dj), D(b, di))));
        r.set(d, s);
        break;
      }
      case Deriv::XXX: {
        // f_xxx g + 3 f_xx g_x + 3 f_x g_xx + f g_xxx
        Var s = t.add(term(D(a, Deriv::XXX), b.value), term(a.value, D(b, Deriv::XXX)));
        s = t.add(s, t.scale(term(D(a, Deriv::XX), D(b, Deriv::X)), 3.0));
        s = t.add(s, t.scale(term(D(a, Deriv::X), D(b, Deriv::XX)), 3.0));
        r.set(d, s);
        break;
      }
      default:
        throw std::logic_error("jet_mul: unsupported slot");
    }
  });
  return r;
}

JetBundle jet_affine(Tape& t, const JetBundle& a, Var weight, Var bias) {
  JetBundle r;
  r.value = bias.valid() ? t.bias_add(t.matmul(a.value, weight), bias)
                         : t.matmul(a.value, weight);
  for (std::size_t i = 0; i < kDerivCount; ++i)
    if (a.active[i]) r.set(static_cast<Deriv>(i), t.matmul(a.comp[i], weight));
  return r;
}

JetBundle jet_act(Tape& t, const JetBundle& z, ActKind act) {
  JetBundle r;
  r.value = t.act(z.value, act, 0);

  Var s1, s2, s3;  // sigma', sigma'', sigma''' at z (recorded lazily)
  auto d1 = [&] {
    if (!s1.valid()) s1 = t.act(z.value, act, 1);
    return s1;
  };
  auto d2 = [&] {
    if (!s2.valid()) s2 = t.act(z.value, act, 2);
    return s2;
  };
  auto d3 = [&] {
    if (!s3.valid()) s3 = t.act(z.value, act, 3);
    return s3;
  };

  auto first = [&](Deriv d) { r.set(d, t.mul(d1(), z.get(d))); };
  auto second = [&](Deriv d, Deriv dlin) {
    // sigma'' z_i^2 + sigma' z_ii
    Var zi = z.get(dlin);
    r.set(d, t.add(t.mul(d2(), t.mul(zi, zi)), t.mul(d1(), z.get(d))));
  };
  auto mixed = [&](Deriv d, Deriv di, Deriv dj) {
    // sigma'' z_i z_j + sigma' z_ij
    r.set(d, t.add(t.mul(d2(), t.mul(z.get(di), z.get(dj))), t.mul(d1(), z.get(d))));
  };

  if (z.has(Deriv::T)) first(Deriv::T);
  if (z.has(Deriv::X)) first(Deriv::X);
  if (z.has(Deriv::Y)) first(Deriv::Y);
  if (z.has(Deriv::XX)) second(Deriv::XX, Deriv::X);
  if (z.has(Deriv::YY)) second(Deriv::YY, Deriv::Y);
  if (z.has(Deriv::XY)) mixed(Deriv::XY, Deriv::X, Deriv::Y);
  if (z.has(Deriv::XT)) mixed(Deriv::XT, Deriv::X, Deriv::T);
  if (z.has(Deriv::XXX)) {
    // sigma''' z_x^3 + 3 sigma'' z_x z_xx + sigma' z_xxx
    Var zx = z.get(Deriv::X);
    Var cube = t.mul(t.mul(zx, zx), zx);
    Var s = t.mul(d3(), cube);
    s = t.add(s, t.scale(t.mul(d2(), t.mul(zx, z.get(Deriv::XX))), 3.0));
    s = t.add(s, t.mul(d1(), z.get(Deriv::XXX)));
    r.set(Deriv::XXX, s);
  }
  return r;
}

JetBundle jet_const_like(Tape& t, const JetBundle& like, Var value) {
  JetBundle r;
  r.value = value;
  const Tensor zero = Tensor::zeros(t.value(value).shape());
  Var z;
  for (std::size_t i = 0; i < kDerivCount; ++i)
    if (like.active[i]) {
      if (!z.valid()) z = t.leaf(zero);
      r.set(static_cast<Deriv>(i), z);
    }
  return r;
}

}  // namespace fepinn
