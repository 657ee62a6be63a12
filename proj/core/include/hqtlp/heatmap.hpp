#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "hqtlp/tensor.hpp"

namespace hqtlp::cli {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Pixel colour of weight w.
///   w <= 0             -> black (0, 0, 0)
///   v = log(1 + w) / log(1 + w_max), clamped to [0, 1]
///   v in [0, 1/3]      -> (128 + 127·3v, 0, 0)            dark red to red
///   v in [1/3, 2/3]    -> (255, 255·(3v − 1), 0)           red to yellow
///   v in [2/3, 1]      -> (255, 255, 255·(3v − 2))         yellow to white
/// Channels are rounded to the nearest integer.
Rgb heat_color(double w, double w_max);

// Row-major n×n pixels (pixel (i, j) is entry (i, j)).
std::vector<Rgb> render_heatmap(const Tensor& adj, double w_max);

// Binary PPM (P6, maxval 255).
void write_ppm(std::ostream& out, const Tensor& adj, double w_max);
void write_ppm(const std::filesystem::path& path, const Tensor& adj, double w_max);

}  // namespace hqtlp::cli
