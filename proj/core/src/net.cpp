#include "fepinn/net.hpp"

#include <cmath>
#include <stdexcept>

namespace fepinn {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  Tensor w({fan_in, fan_out});
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-limit, limit);
  return w;
}

}  // namespace

void NetworkConfig::validate() const {
  if (depth < 1 || width < 1) throw std::invalid_argument("NetworkConfig: bad depth/width");
  if (in_dim < 2 || in_dim > 3) throw std::invalid_argument("NetworkConfig: in_dim must be 2 or 3");
  if (out_dim < 1 || out_dim > 2) throw std::invalid_argument("NetworkConfig: out_dim must be 1 or 2");
  if (fourier_embedding && ff_m < 1) throw std::invalid_argument("NetworkConfig: ff_m < 1");
}

JetNet::JetNet(NetworkConfig cfg, Rng init_rng) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t d_in = static_cast<std::size_t>(cfg_.in_dim);
  const std::size_t width = static_cast<std::size_t>(cfg_.width);

  std::size_t feat = d_in;
  if (cfg_.fourier_embedding) {
    ff_.sigma = cfg_.ff_sigma;
    ff_.b = Tensor({static_cast<std::size_t>(cfg_.ff_m), d_in});
    for (std::size_t i = 0; i < ff_.b.size(); ++i) ff_.b[i] = init_rng.normal(0.0, cfg_.ff_sigma);
    feat = 2 * static_cast<std::size_t>(cfg_.ff_m);
  }

  auto push_param = [&](const std::string& name, Tensor v) {
    params_.emplace_back(name, std::move(v));
    return static_cast<int>(params_.size()) - 1;
  };

  if (cfg_.arch == Arch::Modified) {
    enc_w1_ = push_param("enc1.w", glorot(feat, width, init_rng));
    enc_b1_ = push_param("enc1.b", Tensor({width}));
    enc_w2_ = push_param("enc2.w", glorot(feat, width, init_rng));
    enc_b2_ = push_param("enc2.b", Tensor({width}));
  }
  std::size_t in = feat;
  for (int l = 0; l < cfg_.depth; ++l) {
    w_.push_back(push_param("layer" + std::to_string(l) + ".w", glorot(in, width, init_rng)));
    bvec_.push_back(push_param("layer" + std::to_string(l) + ".b", Tensor({width})));
    in = width;
  }
  for (int h = 0; h < cfg_.out_dim; ++h) {
    head_w_.push_back(push_param("head" + std::to_string(h) + ".w", glorot(width, 1, init_rng)));
    head_b_.push_back(push_param("head" + std::to_string(h) + ".b", Tensor({1})));
  }
}

std::size_t JetNet::param_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : params_) n += t.size();
  return n;
}

JetBundle JetNet::input_bundle(Tape& t, const Tensor& points, const JetSpec& spec) const {
  spec.validate();
  if (points.rank() != 2 || points.extent(1) != static_cast<std::size_t>(cfg_.in_dim))
    throw std::invalid_argument("forward_jet: points must be B x in_dim");
  const std::size_t b = points.extent(0);
  const std::size_t d = points.extent(1);
  // coordinate layout: (x, t) in 1-D, (x, y, t) in 2-D
  const std::size_t tcol = d - 1;
  if (spec.spatial_dims == 2 && d != 3)
    throw std::invalid_argument("forward_jet: 2-D jets need 3 input coordinates");

  JetBundle in;
  in.value = t.leaf(points);
  auto onehot = [&](std::size_t col) {
    Tensor m({b, d});
    for (std::size_t i = 0; i < b; ++i) m.at2(i, col) = 1.0;
    return t.leaf(std::move(m));
  };
  Var zeros;
  auto zero = [&] {
    if (!zeros.valid()) zeros = t.leaf(Tensor::zeros({b, d}));
    return zeros;
  };
  if (spec.wants(Deriv::T)) in.set(Deriv::T, onehot(tcol));
  if (spec.wants(Deriv::X)) in.set(Deriv::X, onehot(0));
  if (spec.wants(Deriv::Y)) in.set(Deriv::Y, onehot(1));
  for (Deriv dd : {Deriv::XX, Deriv::YY, Deriv::XY, Deriv::XT, Deriv::XXX})
    if (spec.wants(dd)) in.set(dd, zero());
  return in;
}

JetBundle fourier_embed(Tape& t, const JetBundle& in, const FourierFeatureMap& map) {
  const Tensor& b = map.b;
  const std::size_t m = b.extent(0), d = b.extent(1);
  // weight 2 pi B^T, frozen (recorded as a leaf, not a parameter)
  Tensor wt({d, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) wt.at2(j, i) = kTwoPi * b.at2(i, j);
  Var w = t.leaf(std::move(wt));
  JetBundle z = jet_affine(t, in, w, Var{});
  JetBundle s = jet_act(t, z, ActKind::Sin);
  JetBundle c = jet_act(t, z, ActKind::Cos);
  JetBundle out;
  out.value = t.concat_cols(s.value, c.value);
  for (std::size_t i = 0; i < kDerivCount; ++i)
    if (s.active[i]) out.set(static_cast<Deriv>(i), t.concat_cols(s.comp[i], c.comp[i]));
  return out;
}

JetBundle JetNet::embed(Tape& t, const JetBundle& in) const {
  if (!cfg_.fourier_embedding) return in;
  return fourier_embed(t, in, ff_);
}

std::vector<JetBundle> JetNet::forward_jet(Tape& t, const Tensor& points, const JetSpec& spec,
                                           Bound* bound) const {
  std::vector<Var> pv(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) pv[i] = t.leaf(params_[i].second);
  if (bound) bound->vars = pv;

  JetBundle h = embed(t, input_bundle(t, points, spec));

  if (cfg_.arch == Arch::Plain) {
    for (std::size_t l = 0; l < w_.size(); ++l)
      h = jet_act(t, jet_affine(t, h, pv[w_[l]], pv[bvec_[l]]), cfg_.activation);
  } else {
    // gated recurrence: h <- (1 - g) .* h1 + g .* h2 with two fixed encoders
    JetBundle h1 = jet_act(t, jet_affine(t, h, pv[enc_w1_], pv[enc_b1_]), cfg_.activation);
    JetBundle h2 = jet_act(t, jet_affine(t, h, pv[enc_w2_], pv[enc_b2_]), cfg_.activation);
    for (std::size_t l = 0; l < w_.size(); ++l) {
      JetBundle g = jet_act(t, jet_affine(t, h, pv[w_[l]], pv[bvec_[l]]), cfg_.activation);
      // h1 + g .* (h2 - h1)
      h = jet_add(t, h1, jet_mul(t, g, jet_sub(t, h2, h1)));
    }
  }

  std::vector<JetBundle> heads;
  heads.reserve(head_w_.size());
  for (std::size_t k = 0; k < head_w_.size(); ++k)
    heads.push_back(jet_affine(t, h, pv[head_w_[k]], pv[head_b_[k]]));
  return heads;
}

Tensor JetNet::forward_values(const Tensor& points) const {
  if (points.rank() != 2 || points.extent(1) != static_cast<std::size_t>(cfg_.in_dim))
    throw std::invalid_argument("forward_values: points must be B x in_dim");
  const std::size_t bsz = points.extent(0);
  const std::size_t width = static_cast<std::size_t>(cfg_.width);

  Tensor h = points;
  if (cfg_.fourier_embedding) {
    const Tensor& b = ff_.b;
    const std::size_t m = b.extent(0), d = b.extent(1);
    Tensor feat({bsz, 2 * m});
    for (std::size_t i = 0; i < bsz; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < d; ++c) dot += b.at2(j, c) * points.at2(i, c);
        feat.at2(i, j) = std::sin(kTwoPi * dot);
        feat.at2(i, m + j) = std::cos(kTwoPi * dot);
      }
    h = std::move(feat);
  }

  auto affine_act = [&](const Tensor& in, const Tensor& w, const Tensor& bias, bool with_act) {
    const std::size_t m = in.extent(0), k = in.extent(1), p = w.extent(1);
    Tensor out({m, p});
    gemm_nn(in.data(), w.data(), out.data(), m, k, p, false);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < p; ++j) out.at2(i, j) += bias[j];
    if (with_act) act_eval(cfg_.activation, 0, out.span(), out.span());
    return out;
  };

  if (cfg_.arch == Arch::Plain) {
    for (std::size_t l = 0; l < w_.size(); ++l)
      h = affine_act(h, params_[w_[l]].second, params_[bvec_[l]].second, true);
  } else {
    Tensor h1 = affine_act(h, params_[enc_w1_].second, params_[enc_b1_].second, true);
    Tensor h2 = affine_act(h, params_[enc_w2_].second, params_[enc_b2_].second, true);
    for (std::size_t l = 0; l < w_.size(); ++l) {
      Tensor g = affine_act(h, params_[w_[l]].second, params_[bvec_[l]].second, true);
      Tensor nh({bsz, width});
      for (std::size_t i = 0; i < nh.size(); ++i)
        nh[i] = h1[i] + g[i] * (h2[i] - h1[i]);
      h = std::move(nh);
    }
  }

  Tensor out({bsz, static_cast<std::size_t>(cfg_.out_dim)});
  for (std::size_t k = 0; k < head_w_.size(); ++k) {
    const Tensor& w = params_[head_w_[k]].second;
    const Tensor& bias = params_[head_b_[k]].second;
    for (std::size_t i = 0; i < bsz; ++i) {
      double s = bias[0];
      for (std::size_t j = 0; j < width; ++j) s += h.at2(i, j) * w[j];
      out.at2(i, k) = s;
    }
  }
  return out;
}

}  // namespace fepinn
