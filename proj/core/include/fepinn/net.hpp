#pragma once

#include <string>
#include <vector>

#include "fepinn/jet.hpp"
#include "fepinn/rng.hpp"
#include "fepinn/tape.hpp"

namespace fepinn {

enum class Arch { Plain, Modified };

/// Fourier feature map (sin(2 pi B p), cos(2 pi B p)); B is drawn once from
/// N(0, sigma^2) and frozen.
struct FourierFeatureMap {
  Tensor b;  // m x in_dim
  double sigma = 1.0;
};

struct NetworkConfig {
  int depth = 4;   // hidden layers
  int width = 128;
  ActKind activation = ActKind::Tanh;  // must be C^3; ReLU is not an option here
  Arch arch = Arch::Plain;
  bool fourier_embedding = false;
  double ff_sigma = 1.0;
  int ff_m = 64;
  int in_dim = 2;   // (x, t) or (x, y, t)
  int out_dim = 1;  // 2 for the (psi, omega) pair

  void validate() const;
};

/// MLP (plain or gated "modified" variant, optional Fourier feature
/// embedding) whose forward pass propagates input-derivative jets
/// analytically. All jet components live on the tape, so parameter gradients
/// of any component come out of one backward pass.
class JetNet {
public:
  JetNet(NetworkConfig cfg, Rng init_rng);

  const NetworkConfig& config() const { return cfg_; }

  std::size_t param_count() const;
  std::vector<std::pair<std::string, Tensor>>& params() { return params_; }
  const std::vector<std::pair<std::string, Tensor>>& params() const { return params_; }
  const FourierFeatureMap* feature_map() const {
    return cfg_.fourier_embedding ? &ff_ : nullptr;
  }

  /// Parameter nodes pushed onto a tape for one forward pass, parallel to
  /// params().
  struct Bound {
    std::vector<Var> vars;
  };

  /// Jets of every output head at the given points (B x in_dim).
  std::vector<JetBundle> forward_jet(Tape& t, const Tensor& points, const JetSpec& spec,
                                     Bound* bound = nullptr) const;

  /// Tape-free value evaluation (B x out_dim), used on evaluation meshes.
  Tensor forward_values(const Tensor& points) const;

private:
  JetBundle input_bundle(Tape& t, const Tensor& points, const JetSpec& spec) const;
  JetBundle embed(Tape& t, const JetBundle& in) const;

  NetworkConfig cfg_;
  FourierFeatureMap ff_;
  std::vector<std::pair<std::string, Tensor>> params_;
  // indices into params_ for the pieces of the architecture
  std::vector<int> w_, bvec_;
  int enc_w1_ = -1, enc_b1_ = -1, enc_w2_ = -1, enc_b2_ = -1;
  std::vector<int> head_w_, head_b_;
};

/// Fourier feature embedding of a raw point batch, with exact feature jets.
/// Exposed standalone for tests; JetNet uses the same path internally.
JetBundle fourier_embed(Tape& t, const JetBundle& in, const FourierFeatureMap& map);

}  // namespace fepinn
