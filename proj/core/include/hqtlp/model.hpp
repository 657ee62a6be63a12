#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hqtlp/autodiff.hpp"
#include "hqtlp/dyngraph.hpp"
#include "hqtlp/random.hpp"
#include "hqtlp/tensor.hpp"

namespace hqtlp::model {

/// Layer sizes of the generator and discriminator. `nodes` has no default;
/// everything else can be overridden from the run config.
struct ModelDims {
  std::size_t nodes = 0;
  std::size_t noise_dim = 16;     // per-node noise attributes fed to GCN layer 1
  std::size_t gcn1_dim = 64;
  std::size_t gcn2_dim = 32;
  std::size_t hidden_dim = 128;   // GRU state
  std::size_t disc_hidden1 = 256;
  std::size_t disc_hidden2 = 64;

  std::size_t pairs() const { return graph::pair_count(nodes); }
  void validate() const;
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

template <class T>
using Named = std::pair<std::string, T*>;

// GRU gates: reset (r), update (z), candidate (c).
struct GruParams {
  Tensor w_r, w_z, w_c;  // input × hidden
  Tensor u_r, u_z, u_c;  // hidden × hidden
  Tensor b_r, b_z, b_c;  // 1 × hidden

  static GruParams glorot(std::size_t input, std::size_t hidden, Rng& rng);
  static GruParams zeros(std::size_t input, std::size_t hidden);
  std::vector<Named<Tensor>> named(const std::string& prefix);
  std::vector<Named<const Tensor>> named(const std::string& prefix) const;
};

// LSTM gates: input (i), forget (f), output (o), cell candidate (g).
struct LstmParams {
  Tensor w_i, w_f, w_o, w_g;
  Tensor u_i, u_f, u_o, u_g;
  Tensor b_i, b_f, b_o, b_g;

  static LstmParams glorot(std::size_t input, std::size_t hidden, Rng& rng);
  static LstmParams zeros(std::size_t input, std::size_t hidden);
  std::vector<Named<Tensor>> named(const std::string& prefix);
  std::vector<Named<const Tensor>> named(const std::string& prefix) const;
};

/// Generator: GCN(noise) -> GCN -> GRU over the window -> FC -> sigmoid.
struct GeneratorParams {
  Tensor gcn1;  // noise_dim × gcn1_dim
  Tensor gcn2;  // gcn1_dim × gcn2_dim
  GruParams gru;  // input nodes*gcn2_dim
  Tensor fc_w;  // hidden_dim × pairs
  Tensor fc_b;  // 1 × pairs

  static GeneratorParams init(const ModelDims& dims, Rng& rng);
  static GeneratorParams zeros(const ModelDims& dims);
  std::vector<Named<Tensor>> named();
  std::vector<Named<const Tensor>> named() const;
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  std::size_t parameter_count() const;
  friend bool operator==(const GeneratorParams& a, const GeneratorParams& b);
};

/// Discriminator MLP: pairs -> h1 (ReLU) -> h2 (ReLU) -> 1 (logistic).
struct DiscriminatorParams {
  Tensor w1, b1, w2, b2, w3, b3;

  static DiscriminatorParams init(const ModelDims& dims, Rng& rng);
  static DiscriminatorParams zeros(const ModelDims& dims);
  std::vector<Named<Tensor>> named();
  std::vector<Named<const Tensor>> named() const;
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  friend bool operator==(const DiscriminatorParams& a, const DiscriminatorParams& b);
};

// ---------------------------------------------------------------------------
// Binding parameters to a tape. Parameter ids follow tensors() order, so
// ordered_gradients() lines up with it.

std::vector<Var> bind(Tape& tape, std::span<const Tensor* const> tensors, bool tracked);
std::vector<Tensor> ordered_gradients(const GradientMap& grads, std::size_t count);

struct GruVars {
  Var w_r, w_z, w_c, u_r, u_z, u_c, b_r, b_z, b_c;
  static GruVars from(std::span<const Var> v);  // 9 vars in GruParams order
};

struct LstmVars {
  Var w_i, w_f, w_o, w_g, u_i, u_f, u_o, u_g, b_i, b_f, b_o, b_g;
  static LstmVars from(std::span<const Var> v);
};

struct GeneratorVars {
  Var gcn1, gcn2;
  GruVars gru;
  Var fc_w, fc_b;
};

struct DiscriminatorVars {
  Var w1, b1, w2, b2, w3, b3;
};

GeneratorVars bind_generator(Tape& tape, const GeneratorParams& params, bool tracked);
DiscriminatorVars bind_discriminator(Tape& tape, const DiscriminatorParams& params, bool tracked);

// ---------------------------------------------------------------------------
// Layers

enum class Activation { kLinear, kRelu };

// activation(Â · H · W)
Var gcn_layer(const Var& a_hat, const Var& h, const Var& w, Activation activation);

// Both GCN layers for one step: ReLU layer on the noise, then a linear layer.
Var gcn_stack(const Var& a_hat, const Var& noise, const Var& gcn1, const Var& gcn2);

/// One GRU step:
///   r = σ(x W_r + h U_r + b_r)
///   z = σ(x W_z + h U_z + b_z)
///   c = tanh(x W_c + (r ∘ h) U_c + b_c)
///   h' = z ∘ h + (1 - z) ∘ c
Var gru_cell(const Var& x, const Var& h_prev, const GruVars& p);

// Same update with the input projections x W + b already computed (used to
// project a whole sequence with one matmul per gate).
Var gru_step(const Var& xw_r, const Var& xw_z, const Var& xw_c, const Var& h_prev,
             const GruVars& p);

// Runs the GRU over the rows of `inputs` (L × input) from a zero state and
// returns the last hidden state.
Var gru_sequence(const Var& inputs, const GruVars& p);

struct LstmState {
  Var h;
  Var c;
};

// Standard LSTM step: c' = f ∘ c + i ∘ g, h' = o ∘ tanh(c').
LstmState lstm_cell(const Var& x, const LstmState& prev, const LstmVars& p);
Var lstm_sequence(const Var& inputs, const LstmVars& p);

// ---------------------------------------------------------------------------
// Generator / discriminator

// L independent standard-normal n × noise_dim matrices.
std::vector<Tensor> draw_noise(Rng& rng, std::size_t steps, const ModelDims& dims);

/// Generator on a tape. `a_hats` are gcn_normalize'd scaled adjacencies of the
/// window, `noise` one matrix per step. Returns the 1 × pairs upper triangle
/// of the predicted scaled snapshot, each entry in (0, 1).
Var generator_forward(Tape& tape, const GeneratorVars& g, std::span<const Tensor> a_hats,
                      std::span<const Tensor> noise);

// Untracked convenience: predicted scaled adjacency (n × n, symmetric, zero
// diagonal) for a window of scaled snapshots.
Tensor generator_forward(std::span<const graph::Snapshot> inputs, std::span<const Tensor> noise,
                         const GeneratorParams& params);

// Logit of D for a 1 × pairs upper-triangle input.
Var discriminator_logit(const DiscriminatorVars& d, const Var& upper);

// Probability-of-real for a scaled adjacency; only the upper triangle is read.
double discriminator_forward(const Tensor& adj_scaled, const DiscriminatorParams& params);

// ---------------------------------------------------------------------------
// Checkpoints: versioned text dump, values in %.17g so load(save(x)) == x
// bit for bit.

struct Checkpoint {
  ModelDims dims;
  GeneratorParams generator;
  DiscriminatorParams discriminator;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hqtlp::model
