#include "hqtlp/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include "hqtlp/errors.hpp"

namespace hqtlp::cli {

namespace {

std::uint8_t channel(double x) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 255.0)));
}

}  // namespace

Rgb heat_color(double w, double w_max) {
  if (!(w > 0.0)) return {};
  if (!(w_max > 0.0)) throw ContractError("heatmap w_max must be positive");
  const double v = std::clamp(std::log1p(w) / std::log1p(w_max), 0.0, 1.0);
  if (v <= 1.0 / 3.0) return {channel(128.0 + 127.0 * 3.0 * v), 0, 0};
  if (v <= 2.0 / 3.0) return {255, channel(255.0 * (3.0 * v - 1.0)), 0};
  return {255, 255, channel(255.0 * (3.0 * v - 2.0))};
}

std::vector<Rgb> render_heatmap(const Tensor& adj, double w_max) {
  std::vector<Rgb> px;
  px.reserve(adj.size());
  for (std::size_t i = 0; i < adj.rows(); ++i)
    for (std::size_t j = 0; j < adj.cols(); ++j) px.push_back(heat_color(adj(i, j), w_max));
  return px;
}

void write_ppm(std::ostream& out, const Tensor& adj, double w_max) {
  out << "P6\n" << adj.cols() << ' ' << adj.rows() << "\n255\n";
  for (const Rgb& p : render_heatmap(adj, w_max)) {
    const char bytes[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(bytes, 3);
  }
}

void write_ppm(const std::filesystem::path& path, const Tensor& adj, double w_max) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_ppm(out, adj, w_max);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace hqtlp::cli
