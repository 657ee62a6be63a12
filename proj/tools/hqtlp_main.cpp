#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hqtlp/bench.hpp"
#include "hqtlp/config.hpp"
#include "hqtlp/datagen.hpp"
#include "hqtlp/errors.hpp"
#include "hqtlp/heatmap.hpp"
#include "hqtlp/model.hpp"
#include "hqtlp/training.hpp"

namespace {

using namespace hqtlp;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> window;
  std::optional<std::size_t> test_steps;
  std::optional<std::string> methods;
  std::optional<std::string> out;
  std::string dataset;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON run config (also HQTLP_CONFIG)");
  app->add_option("--seed", f.seed, "Random seed");
  app->add_option("--window", f.window, "Window length L");
  app->add_option("--test-steps", f.test_steps, "Number of test snapshots at the end of the data");
  app->add_option("--dataset", f.dataset, "Edge-list file (default: synthesize from the config)");
}

// defaults < config file < HQTLP_* environment < flags
cli::RunConfig resolve(const CommonFlags& f) {
  cli::RunConfig c;
  std::string path = f.config;
  if (path.empty()) {
    if (const auto env = cli::process_env("HQTLP_CONFIG")) path = *env;
  }
  if (!path.empty()) c = cli::load_run_config(path);
  cli::apply_env(c);
  if (f.seed) {
    c.train.seed = *f.seed;
    c.synth.seed = *f.seed;
  }
  if (f.window) c.train.window = *f.window;
  if (f.test_steps) c.test_steps = *f.test_steps;
  if (f.methods) c.methods = cli::parse_methods(*f.methods);
  if (f.out) c.out = *f.out;
  if (!f.dataset.empty()) c.dataset = f.dataset;
  c.validate();
  return c;
}

graph::DynamicNetwork dataset(const cli::RunConfig& c) {
  if (!c.dataset.empty()) return data::load_edgelist(c.dataset);
  return data::gen_synthetic(c.synth);
}

void print_summary(const graph::DynamicNetwork& net) {
  const auto s = data::summarize(net);
  std::printf("nodes %zu  steps %zu  sparsity %.4f  weights [%s, %s]\n", s.nodes, s.steps, s.sparsity,
              cli::format_double(s.w_min).c_str(), cli::format_double(s.w_max).c_str());
}

train::TrainConfig hqtlp_train_config(const cli::RunConfig& c) {
  train::TrainConfig tc = c.train;
  tc.seed = cli::method_seed(c.train.seed, "hqtlp");
  return tc;
}

int cmd_generate(const CommonFlags& f, const std::string& preset, std::optional<std::size_t> nodes,
                 std::optional<std::size_t> steps, const std::string& out) {
  const cli::RunConfig c = resolve(f);
  data::SynthConfig s = c.synth;
  if (!preset.empty()) {
    s = data::preset(preset);
    s.seed = c.synth.seed;
  }
  if (nodes) s.nodes = *nodes;
  if (steps) s.steps = *steps;
  const auto net = data::gen_synthetic(s);
  data::save_edgelist(net, out);
  print_summary(net);
  return 0;
}

int cmd_train(const CommonFlags& f) {
  const cli::RunConfig c = resolve(f);
  const auto net = dataset(c);
  const std::size_t split = cli::bench_split(net.steps(), c.train.window, c.test_steps);
  const train::SequenceData data(net, split);
  model::ModelDims dims = c.model;
  dims.nodes = net.nodes();
  train::HqtlpModel model(dims, hqtlp_train_config(c));

  const std::filesystem::path out = c.out;
  std::filesystem::create_directories(out);
  std::ofstream log(out / "train_log.csv", std::ios::binary);
  log << "epoch,window,loss_g,loss_d\n";
  model.set_observer([&](const train::TrainEvent& e) {
    log << e.epoch << ',' << e.target << ',' << cli::format_double(e.loss_g) << ','
        << cli::format_double(e.loss_d) << '\n';
  });
  model.pretrain(train::History(data, split), train::targets_before(split, c.train.window));
  model::save_checkpoint(out / "checkpoint.txt", {dims, model.generator(), model.discriminator()});
  std::ofstream(out / "run_config.json", std::ios::binary) << cli::to_json(c).dump(2) << '\n';
  std::printf("trained on steps [0, %zu); checkpoint %s\n", split, (out / "checkpoint.txt").string().c_str());
  return 0;
}

// Step t (t <= T) from t-L .. t-1 with a saved model, in original units.
Tensor predict_step(const cli::RunConfig& c, const graph::DynamicNetwork& net, const std::string& checkpoint,
                    std::size_t t, double& w_max) {
  const std::size_t split = cli::bench_split(net.steps(), c.train.window, c.test_steps);
  if (t < c.train.window || t > net.steps()) {
    throw UsageError("--t must lie in [" + std::to_string(c.train.window) + ", " + std::to_string(net.steps()) + "]");
  }
  auto ck = model::load_checkpoint(checkpoint);
  if (ck.dims.nodes != net.nodes()) throw ConfigError("checkpoint node count does not match the dataset");
  const train::SequenceData data(net, split);
  train::HqtlpModel model(ck.dims, hqtlp_train_config(c), std::move(ck.generator), std::move(ck.discriminator));
  w_max = data.w_max();
  return graph::unscale(graph::symmetrize_and_clean(model.predict(train::History(data, t))), w_max);
}

int cmd_predict(const CommonFlags& f, const std::string& checkpoint, std::size_t t, const std::string& out) {
  const cli::RunConfig c = resolve(f);
  const auto net = dataset(c);
  double w_max = 0.0;
  Tensor pred = predict_step(c, net, checkpoint, t, w_max);
  if (t < net.steps()) {
    const auto m = metrics::evaluate(pred, net[t].adj, c.train.threshold * w_max, c.train.mismatch_base);
    std::printf("t %zu  rmse %s  ew_kl %s  mr %s\n", t, cli::format_double(m.rmse).c_str(),
                cli::format_double(m.ew_kl).c_str(), cli::format_double(m.mr).c_str());
  }
  std::vector<Tensor> one{std::move(pred)};
  data::save_edgelist(graph::DynamicNetwork(std::move(one)), out);
  return 0;
}

int cmd_bench(const CommonFlags& f, bool parallel, bool save_predictions) {
  const cli::RunConfig c = resolve(f);
  const auto net = dataset(c);
  print_summary(net);
  const auto result = cli::run_bench(net, c, parallel, [](const std::string& m, const metrics::Averages& a, double s) {
    std::printf("%-7s armse %-12.6g aew_kl %-12.6g amr %-10.6g %.1fs\n", m.c_str(), a.armse, a.aew_kl, a.amr, s);
    std::fflush(stdout);
  });
  cli::write_bench(result, c, c.out, save_predictions, net.nodes(), net.steps());
  std::printf("results in %s\n", c.out.c_str());
  return 0;
}

int cmd_heatmap(const CommonFlags& f, const std::string& input, const std::string& checkpoint, std::size_t t,
                std::optional<double> wmax, const std::string& out) {
  cli::RunConfig c = resolve(f);
  if (!input.empty()) c.dataset = input;
  const auto net = dataset(c);
  Tensor adj;
  double scale = 0.0;
  if (!checkpoint.empty()) {
    adj = predict_step(c, net, checkpoint, t, scale);
  } else {
    if (t >= net.steps()) throw UsageError("--t must be below " + std::to_string(net.steps()));
    adj = net[t].adj;
    scale = net.max_weight();
  }
  if (wmax) scale = *wmax;
  if (!(scale > 0.0)) scale = 1.0;
  cli::write_ppm(std::filesystem::path(out), adj, scale);
  std::printf("%zux%zu image written to %s\n", adj.rows(), adj.cols(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal link prediction for weighted dynamic networks"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string preset, output, checkpoint, input;
  std::optional<std::size_t> nodes, steps;
  std::size_t t = 0;
  std::optional<double> wmax;
  bool parallel = false, save_predictions = false;

  auto* gen = app.add_subcommand("generate", "Write a synthetic edge-list dataset");
  add_common(gen, f);
  gen->add_option("--preset", preset, "mesh-like | adhoc-like | dcn-like");
  gen->add_option("--nodes", nodes, "Override the node count");
  gen->add_option("--steps", steps, "Override the number of snapshots");
  gen->add_option("-o,--output", output, "Output edge-list path")->required();

  auto* tr = app.add_subcommand("train", "Pretrain the adversarial model and save a checkpoint");
  add_common(tr, f);
  tr->add_option("--out", f.out, "Output directory");

  auto* pr = app.add_subcommand("predict", "Predict one snapshot from a checkpoint");
  add_common(pr, f);
  pr->add_option("--checkpoint", checkpoint, "Checkpoint written by train")->required();
  pr->add_option("--t", t, "Step to predict (may equal T for a forecast)")->required();
  pr->add_option("-o,--output", output, "Output edge-list path")->required();

  auto* be = app.add_subcommand("bench", "Run every method on the shared split");
  add_common(be, f);
  be->add_option("--methods", f.methods, "Comma-separated methods or 'all'");
  be->add_option("--out", f.out, "Output directory");
  be->add_flag("--parallel", parallel, "Run methods concurrently");
  be->add_flag("--save-predictions", save_predictions, "Also write predicted snapshots");

  auto* hm = app.add_subcommand("heatmap", "Render one adjacency matrix as a PPM image");
  add_common(hm, f);
  hm->add_option("--input", input, "Edge-list file (dataset or saved predictions)");
  hm->add_option("--checkpoint", checkpoint, "Render the model prediction instead");
  hm->add_option("--t", t, "Step to render")->required();
  hm->add_option("--wmax", wmax, "Weight mapped to white (default: data maximum)");
  hm->add_option("-o,--output", output, "Output .ppm path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(f, preset, nodes, steps, output);
    if (tr->parsed()) return cmd_train(f);
    if (pr->parsed()) return cmd_predict(f, checkpoint, t, output);
    if (be->parsed()) return cmd_bench(f, parallel, save_predictions);
    if (hm->parsed()) return cmd_heatmap(f, input, checkpoint, t, wmax, output);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
