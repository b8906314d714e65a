#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sdpcd {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

// Stream tags used when splitting a master seed. The numeric values are part
// of the reproducibility contract: changing them changes every derived stream.
enum class StreamTag : std::uint64_t {
  kGraph = 1,
  kPerturbation = 2,
  kSpinInit = 3,
  kSweepOrder = 4,
  kClone = 5,
  kGridPoint = 6,
  kSpectral = 7,
  kReplicate = 8,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for (master, tag, index). Independent of call order, so work
/// can be scheduled in any order without changing the streams.
Seed derive_seed(Seed master, StreamTag tag, std::uint64_t index = 0) noexcept;

inline Rng make_rng(Seed seed) { return Rng(seed); }

}  // namespace sdpcd
