#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hqtlp {

using Rng = std::mt19937_64;

// Independent, reproducible seed for a named stream ("noise", "disc", a
// method name, ...) derived from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

}  // namespace hqtlp
