#include "hqtlp/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hqtlp/errors.hpp"

namespace hqtlp::model {

namespace {

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(fan_in, fan_out);
  for (double& x : t.data()) x = dist(rng);
  return t;
}

template <class T>
std::vector<T*> strip(const std::vector<Named<T>>& named) {
  std::vector<T*> out;
  out.reserve(named.size());
  for (const auto& [name, t] : named) out.push_back(t);
  return out;
}

template <class P>
bool equal_params(const P& a, const P& b) {
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  if (ta.size() != tb.size()) return false;
  for (std::size_t k = 0; k < ta.size(); ++k)
    if (!(*ta[k] == *tb[k])) return false;
  return true;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}

}  // namespace

void ModelDims::validate() const {
  if (nodes < 2) throw ConfigError("model needs at least 2 nodes");
  if (noise_dim == 0 || gcn1_dim == 0 || gcn2_dim == 0 || hidden_dim == 0 || disc_hidden1 == 0 ||
      disc_hidden2 == 0) {
    throw ConfigError("all layer sizes must be positive");
  }
}

// --- parameter containers ----------------------------------------------------

GruParams GruParams::glorot(std::size_t input, std::size_t hidden, Rng& rng) {
  GruParams p;
  p.w_r = model::glorot(input, hidden, rng);
  p.w_z = model::glorot(input, hidden, rng);
  p.w_c = model::glorot(input, hidden, rng);
  p.u_r = model::glorot(hidden, hidden, rng);
  p.u_z = model::glorot(hidden, hidden, rng);
  p.u_c = model::glorot(hidden, hidden, rng);
  p.b_r = Tensor(1, hidden);
  p.b_z = Tensor(1, hidden);
  p.b_c = Tensor(1, hidden);
  return p;
}

GruParams GruParams::zeros(std::size_t input, std::size_t hidden) {
  GruParams p;
  p.w_r = p.w_z = p.w_c = Tensor(input, hidden);
  p.u_r = p.u_z = p.u_c = Tensor(hidden, hidden);
  p.b_r = p.b_z = p.b_c = Tensor(1, hidden);
  return p;
}

std::vector<Named<Tensor>> GruParams::named(const std::string& prefix) {
  return {{prefix + "w_r", &w_r}, {prefix + "w_z", &w_z}, {prefix + "w_c", &w_c},
          {prefix + "u_r", &u_r}, {prefix + "u_z", &u_z}, {prefix + "u_c", &u_c},
          {prefix + "b_r", &b_r}, {prefix + "b_z", &b_z}, {prefix + "b_c", &b_c}};
}

std::vector<Named<const Tensor>> GruParams::named(const std::string& prefix) const {
  return {{prefix + "w_r", &w_r}, {prefix + "w_z", &w_z}, {prefix + "w_c", &w_c},
          {prefix + "u_r", &u_r}, {prefix + "u_z", &u_z}, {prefix + "u_c", &u_c},
          {prefix + "b_r", &b_r}, {prefix + "b_z", &b_z}, {prefix + "b_c", &b_c}};
}

LstmParams LstmParams::glorot(std::size_t input, std::size_t hidden, Rng& rng) {
  LstmParams p;
  for (Tensor* w : {&p.w_i, &p.w_f, &p.w_o, &p.w_g}) *w = model::glorot(input, hidden, rng);
  for (Tensor* u : {&p.u_i, &p.u_f, &p.u_o, &p.u_g}) *u = model::glorot(hidden, hidden, rng);
  for (Tensor* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_g}) *b = Tensor(1, hidden);
  return p;
}

LstmParams LstmParams::zeros(std::size_t input, std::size_t hidden) {
  LstmParams p;
  for (Tensor* w : {&p.w_i, &p.w_f, &p.w_o, &p.w_g}) *w = Tensor(input, hidden);
  for (Tensor* u : {&p.u_i, &p.u_f, &p.u_o, &p.u_g}) *u = Tensor(hidden, hidden);
  for (Tensor* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_g}) *b = Tensor(1, hidden);
  return p;
}

std::vector<Named<Tensor>> LstmParams::named(const std::string& prefix) {
  return {{prefix + "w_i", &w_i}, {prefix + "w_f", &w_f}, {prefix + "w_o", &w_o},
          {prefix + "w_g", &w_g}, {prefix + "u_i", &u_i}, {prefix + "u_f", &u_f},
          {prefix + "u_o", &u_o}, {prefix + "u_g", &u_g}, {prefix + "b_i", &b_i},
          {prefix + "b_f", &b_f}, {prefix + "b_o", &b_o}, {prefix + "b_g", &b_g}};
}

std::vector<Named<const Tensor>> LstmParams::named(const std::string& prefix) const {
  return {{prefix + "w_i", &w_i}, {prefix + "w_f", &w_f}, {prefix + "w_o", &w_o},
          {prefix + "w_g", &w_g}, {prefix + "u_i", &u_i}, {prefix + "u_f", &u_f},
          {prefix + "u_o", &u_o}, {prefix + "u_g", &u_g}, {prefix + "b_i", &b_i},
          {prefix + "b_f", &b_f}, {prefix + "b_o", &b_o}, {prefix + "b_g", &b_g}};
}

GeneratorParams GeneratorParams::init(const ModelDims& dims, Rng& rng) {
  dims.validate();
  GeneratorParams p;
  p.gcn1 = glorot(dims.noise_dim, dims.gcn1_dim, rng);
  p.gcn2 = glorot(dims.gcn1_dim, dims.gcn2_dim, rng);
  p.gru = GruParams::glorot(dims.nodes * dims.gcn2_dim, dims.hidden_dim, rng);
  p.fc_w = glorot(dims.hidden_dim, dims.pairs(), rng);
  p.fc_b = Tensor(1, dims.pairs());
  return p;
}

GeneratorParams GeneratorParams::zeros(const ModelDims& dims) {
  dims.validate();
  GeneratorParams p;
  p.gcn1 = Tensor(dims.noise_dim, dims.gcn1_dim);
  p.gcn2 = Tensor(dims.gcn1_dim, dims.gcn2_dim);
  p.gru = GruParams::zeros(dims.nodes * dims.gcn2_dim, dims.hidden_dim);
  p.fc_w = Tensor(dims.hidden_dim, dims.pairs());
  p.fc_b = Tensor(1, dims.pairs());
  return p;
}

std::vector<Named<Tensor>> GeneratorParams::named() {
  std::vector<Named<Tensor>> out{{"gen.gcn1", &gcn1}, {"gen.gcn2", &gcn2}};
  for (auto& e : gru.named("gen.gru.")) out.push_back(std::move(e));
  out.emplace_back("gen.fc_w", &fc_w);
  out.emplace_back("gen.fc_b", &fc_b);
  return out;
}

std::vector<Named<const Tensor>> GeneratorParams::named() const {
  std::vector<Named<const Tensor>> out{{"gen.gcn1", &gcn1}, {"gen.gcn2", &gcn2}};
  for (auto& e : gru.named("gen.gru.")) out.push_back(std::move(e));
  out.emplace_back("gen.fc_w", &fc_w);
  out.emplace_back("gen.fc_b", &fc_b);
  return out;
}

std::vector<Tensor*> GeneratorParams::tensors() { return strip(named()); }
std::vector<const Tensor*> GeneratorParams::tensors() const { return strip(named()); }

std::size_t GeneratorParams::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : tensors()) n += t->size();
  return n;
}

bool operator==(const GeneratorParams& a, const GeneratorParams& b) { return equal_params(a, b); }

DiscriminatorParams DiscriminatorParams::init(const ModelDims& dims, Rng& rng) {
  dims.validate();
  DiscriminatorParams p;
  p.w1 = glorot(dims.pairs(), dims.disc_hidden1, rng);
  p.b1 = Tensor(1, dims.disc_hidden1);
  p.w2 = glorot(dims.disc_hidden1, dims.disc_hidden2, rng);
  p.b2 = Tensor(1, dims.disc_hidden2);
  p.w3 = glorot(dims.disc_hidden2, 1, rng);
  p.b3 = Tensor(1, 1);
  return p;
}

DiscriminatorParams DiscriminatorParams::zeros(const ModelDims& dims) {
  dims.validate();
  DiscriminatorParams p;
  p.w1 = Tensor(dims.pairs(), dims.disc_hidden1);
  p.b1 = Tensor(1, dims.disc_hidden1);
  p.w2 = Tensor(dims.disc_hidden1, dims.disc_hidden2);
  p.b2 = Tensor(1, dims.disc_hidden2);
  p.w3 = Tensor(dims.disc_hidden2, 1);
  p.b3 = Tensor(1, 1);
  return p;
}

std::vector<Named<Tensor>> DiscriminatorParams::named() {
  return {{"disc.w1", &w1}, {"disc.b1", &b1}, {"disc.w2", &w2},
          {"disc.b2", &b2}, {"disc.w3", &w3}, {"disc.b3", &b3}};
}

std::vector<Named<const Tensor>> DiscriminatorParams::named() const {
  return {{"disc.w1", &w1}, {"disc.b1", &b1}, {"disc.w2", &w2},
          {"disc.b2", &b2}, {"disc.w3", &w3}, {"disc.b3", &b3}};
}

std::vector<Tensor*> DiscriminatorParams::tensors() { return strip(named()); }
std::vector<const Tensor*> DiscriminatorParams::tensors() const { return strip(named()); }

bool operator==(const DiscriminatorParams& a, const DiscriminatorParams& b) {
  return equal_params(a, b);
}

// --- binding -------------------------------------------------------------------

std::vector<Var> bind(Tape& tape, std::span<const Tensor* const> tensors, bool tracked) {
  std::vector<Var> out;
  out.reserve(tensors.size());
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    out.push_back(tracked ? tape.param(*tensors[k], k) : tape.constant(*tensors[k]));
  }
  return out;
}

std::vector<Tensor> ordered_gradients(const GradientMap& grads, std::size_t count) {
  std::vector<Tensor> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(grads.at(k));
  return out;
}

GruVars GruVars::from(std::span<const Var> v) {
  require(v.size() == 9, "GruVars needs 9 tensors");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}

LstmVars LstmVars::from(std::span<const Var> v) {
  require(v.size() == 12, "LstmVars needs 12 tensors");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11]};
}

GeneratorVars bind_generator(Tape& tape, const GeneratorParams& params, bool tracked) {
  const auto v = model::bind(tape, params.tensors(), tracked);
  GeneratorVars g;
  g.gcn1 = v[0];
  g.gcn2 = v[1];
  g.gru = GruVars::from(std::span(v).subspan(2, 9));
  g.fc_w = v[11];
  g.fc_b = v[12];
  return g;
}

DiscriminatorVars bind_discriminator(Tape& tape, const DiscriminatorParams& params, bool tracked) {
  const auto v = model::bind(tape, params.tensors(), tracked);
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

// --- layers --------------------------------------------------------------------

Var gcn_layer(const Var& a_hat, const Var& h, const Var& w, Activation activation) {
  const Tensor& hv = h.value();
  const Tensor& wv = w.value();
  if (a_hat.value().cols() != hv.rows() || hv.cols() != wv.rows()) {
    throw ContractError("gcn_layer: incompatible shapes Â" + a_hat.value().shape_str() + " H" +
                     hv.shape_str() + " W" + wv.shape_str());
  }
  // Propagate over the narrower feature width.
  const Var pre = hv.cols() <= wv.cols() ? matmul(matmul(a_hat, h), w) : matmul(a_hat, matmul(h, w));
  return activation == Activation::kRelu ? relu(pre) : pre;
}

Var gcn_stack(const Var& a_hat, const Var& noise, const Var& gcn1, const Var& gcn2) {
  const Var h1 = gcn_layer(a_hat, noise, gcn1, Activation::kRelu);
  return gcn_layer(a_hat, h1, gcn2, Activation::kLinear);
}

Var gru_step(const Var& xw_r, const Var& xw_z, const Var& xw_c, const Var& h_prev,
             const GruVars& p) {
  const Var r = sigmoid(add(xw_r, matmul(h_prev, p.u_r)));
  const Var z = sigmoid(add(xw_z, matmul(h_prev, p.u_z)));
  const Var c = tanh(add(xw_c, matmul(mul(r, h_prev), p.u_c)));
  return add(mul(z, h_prev), mul(affine(z, -1.0, 1.0), c));
}

Var gru_cell(const Var& x, const Var& h_prev, const GruVars& p) {
  if (x.value().cols() != p.w_r.value().rows() || h_prev.value().cols() != p.u_r.value().rows()) {
    throw ContractError("gru_cell: x" + x.value().shape_str() + " h" + h_prev.value().shape_str() +
                     " do not match W" + p.w_r.value().shape_str());
  }
  return gru_step(add_row(matmul(x, p.w_r), p.b_r), add_row(matmul(x, p.w_z), p.b_z),
                  add_row(matmul(x, p.w_c), p.b_c), h_prev, p);
}

Var gru_sequence(const Var& inputs, const GruVars& p) {
  Tape& tape = *inputs.tape();
  const Var xr = add_row(matmul(inputs, p.w_r), p.b_r);
  const Var xz = add_row(matmul(inputs, p.w_z), p.b_z);
  const Var xc = add_row(matmul(inputs, p.w_c), p.b_c);
  Var h = tape.constant(Tensor(1, p.u_r.value().rows()));
  for (std::size_t t = 0; t < inputs.value().rows(); ++t) {
    h = gru_step(slice_row(xr, t), slice_row(xz, t), slice_row(xc, t), h, p);
  }
  return h;
}

LstmState lstm_cell(const Var& x, const LstmState& prev, const LstmVars& p) {
  if (x.value().cols() != p.w_i.value().rows()) {
    throw ContractError("lstm_cell: x" + x.value().shape_str() + " does not match W" +
                     p.w_i.value().shape_str());
  }
  auto gate = [&](const Var& w, const Var& u, const Var& b) {
    return add(add_row(matmul(x, w), b), matmul(prev.h, u));
  };
  const Var i = sigmoid(gate(p.w_i, p.u_i, p.b_i));
  const Var f = sigmoid(gate(p.w_f, p.u_f, p.b_f));
  const Var o = sigmoid(gate(p.w_o, p.u_o, p.b_o));
  const Var g = tanh(gate(p.w_g, p.u_g, p.b_g));
  const Var c = add(mul(f, prev.c), mul(i, g));
  return {mul(o, tanh(c)), c};
}

Var lstm_sequence(const Var& inputs, const LstmVars& p) {
  Tape& tape = *inputs.tape();
  const std::size_t hidden = p.u_i.value().rows();
  LstmState s{tape.constant(Tensor(1, hidden)), tape.constant(Tensor(1, hidden))};
  for (std::size_t t = 0; t < inputs.value().rows(); ++t) s = lstm_cell(slice_row(inputs, t), s, p);
  return s.h;
}

// --- generator / discriminator ---------------------------------------------------

std::vector<Tensor> draw_noise(Rng& rng, std::size_t steps, const ModelDims& dims) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Tensor> out;
  out.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor z(dims.nodes, dims.noise_dim);
    for (double& x : z.data()) x = normal(rng);
    out.push_back(std::move(z));
  }
  return out;
}

Var generator_forward(Tape& tape, const GeneratorVars& g, std::span<const Tensor> a_hats,
                      std::span<const Tensor> noise) {
  if (a_hats.empty() || a_hats.size() != noise.size()) {
    throw ContractError("generator_forward: need one noise matrix per input snapshot");
  }
  std::vector<Var> rows;
  rows.reserve(a_hats.size());
  for (std::size_t t = 0; t < a_hats.size(); ++t) {
    const Var h = gcn_stack(tape.constant(a_hats[t]), tape.constant(noise[t]), g.gcn1, g.gcn2);
    rows.push_back(reshape(h, {1, h.value().size()}));
  }
  const Var state = gru_sequence(concat_rows(rows), g.gru);
  return sigmoid(add_row(matmul(state, g.fc_w), g.fc_b));
}

Tensor generator_forward(std::span<const graph::Snapshot> inputs, std::span<const Tensor> noise,
                         const GeneratorParams& params) {
  std::vector<Tensor> a_hats;
  a_hats.reserve(inputs.size());
  for (const auto& s : inputs) a_hats.push_back(graph::gcn_normalize(s.adj));
  Tape tape;
  const GeneratorVars g = bind_generator(tape, params, false);
  const Var upper = generator_forward(tape, g, a_hats, noise);
  return graph::from_upper_triangle(upper.value(), inputs.front().nodes());
}

Var discriminator_logit(const DiscriminatorVars& d, const Var& upper) {
  if (upper.value().rank() != 2 || upper.value().rows() != 1 ||
      upper.value().cols() != d.w1.value().rows()) {
    throw ContractError("discriminator: input " + upper.value().shape_str() + " does not match W1" +
                     d.w1.value().shape_str());
  }
  const Var h1 = relu(add_row(matmul(upper, d.w1), d.b1));
  const Var h2 = relu(add_row(matmul(h1, d.w2), d.b2));
  return add_row(matmul(h2, d.w3), d.b3);
}

double discriminator_forward(const Tensor& adj_scaled, const DiscriminatorParams& params) {
  Tape tape;
  const DiscriminatorVars d = bind_discriminator(tape, params, false);
  const Var logit = discriminator_logit(d, tape.constant(graph::upper_triangle(adj_scaled)));
  return sigmoid(logit.value().item());
}

// --- checkpoints ---------------------------------------------------------------

namespace {

constexpr const char* kCheckpointMagic = "hqtlp-checkpoint";
constexpr int kCheckpointVersion = 1;

void write_tensor(std::ostream& os, const std::string& name, const Tensor& t) {
  os << "tensor " << name << ' ' << t.rank();
  for (std::size_t d : t.shape()) os << ' ' << d;
  os << '\n';
  const std::size_t width = t.rank() == 2 ? t.cols() : t.size();
  char buf[32];
  for (std::size_t k = 0; k < t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", t[k]);
    os << buf << ((k + 1) % width == 0 || k + 1 == t.size() ? '\n' : ' ');
  }
}

class TokenReader {
 public:
  explicit TokenReader(std::istream& is) : is_(is) {}

  std::string next(const char* what) {
    std::string tok;
    if (!(is_ >> tok)) throw ValidationError(std::string("checkpoint truncated: expected ") + what);
    return tok;
  }

  std::size_t next_size(const char* what) {
    const std::string tok = next(what);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') throw ValidationError("checkpoint: bad integer '" + tok + "'");
    return static_cast<std::size_t>(v);
  }

  double next_double() {
    const std::string tok = next("value");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw ValidationError("checkpoint: bad number '" + tok + "'");
    return v;
  }

 private:
  std::istream& is_;
};

void read_tensor(TokenReader& in, const std::string& expected_name, Tensor& target) {
  if (in.next("tensor") != "tensor") throw ValidationError("checkpoint: expected 'tensor'");
  const std::string name = in.next("tensor name");
  if (name != expected_name) {
    throw ValidationError("checkpoint: expected tensor " + expected_name + ", found " + name);
  }
  const std::size_t rank = in.next_size("rank");
  std::vector<std::size_t> shape(rank);
  for (auto& d : shape) d = in.next_size("dimension");
  if (shape != target.shape()) {
    throw ValidationError("checkpoint: tensor " + name + " has shape " + shape_str(shape) +
                          ", model expects " + target.shape_str());
  }
  for (double& x : target.data()) x = in.next_double();
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const ModelDims& d = checkpoint.dims;
  os << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  os << "dims " << d.nodes << ' ' << d.noise_dim << ' ' << d.gcn1_dim << ' ' << d.gcn2_dim << ' '
     << d.hidden_dim << ' ' << d.disc_hidden1 << ' ' << d.disc_hidden2 << '\n';
  for (const auto& [name, t] : checkpoint.generator.named()) write_tensor(os, name, *t);
  for (const auto& [name, t] : checkpoint.discriminator.named()) write_tensor(os, name, *t);
  os << "end\n";
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  TokenReader in(is);
  if (in.next("magic") != kCheckpointMagic) throw ValidationError("not an hqtlp checkpoint");
  const std::size_t version = in.next_size("version");
  if (version != kCheckpointVersion) {
    throw ValidationError("unsupported checkpoint version " + std::to_string(version));
  }
  if (in.next("dims") != "dims") throw ValidationError("checkpoint: expected 'dims'");
  Checkpoint c;
  c.dims.nodes = in.next_size("nodes");
  c.dims.noise_dim = in.next_size("noise_dim");
  c.dims.gcn1_dim = in.next_size("gcn1_dim");
  c.dims.gcn2_dim = in.next_size("gcn2_dim");
  c.dims.hidden_dim = in.next_size("hidden_dim");
  c.dims.disc_hidden1 = in.next_size("disc_hidden1");
  c.dims.disc_hidden2 = in.next_size("disc_hidden2");
  c.generator = GeneratorParams::zeros(c.dims);
  c.discriminator = DiscriminatorParams::zeros(c.dims);
  for (const auto& [name, t] : c.generator.named()) read_tensor(in, name, *t);
  for (const auto& [name, t] : c.discriminator.named()) read_tensor(in, name, *t);
  if (in.next("end") != "end") throw ValidationError("checkpoint: missing 'end'");
  return c;
}

}  // namespace hqtlp::model
