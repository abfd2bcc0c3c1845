#pragma once

#include <cstdint>

namespace batchtail {

/// Philox4x32-10 block function. Counter-based: output depends only on (counter, key),
/// so any (seed, stream, index) triple maps to a reproducible substream regardless of
/// thread scheduling.
struct Philox4x32 {
  static void round10(std::uint32_t ctr[4], std::uint32_t key[2]);
};

/// Well-known stream kinds; part of the reproducibility contract.
enum class StreamKind : std::uint64_t {
  noise = 1,
  counts = 2,
  importance = 3,
  user = 15,
};

/// Packs (kind, stage, attempt) into one stream id.
std::uint64_t make_stream(StreamKind kind, unsigned stage, unsigned attempt = 0);

/// Identifies an i.i.d. stream: same (seed, stream) always reproduces the same sequence.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Deterministic generator for one draw slot: (seed, stream, index) fixes the whole
/// substream. Draws that consume a variable number of uniforms (rejection samplers)
/// stay reproducible because each slot owns its own counter lane.
class CounterRng {
 public:
  CounterRng(RngStream s, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform draw strictly inside (0,1); 52-bit resolution.
  double next_u01();
  /// Standard normal via inverse CDF (one uniform per draw).
  double next_normal();

 private:
  void refill();

  std::uint32_t key_[2];
  std::uint32_t base_[2];  // draw index split into two words
  std::uint64_t block_ = 0;
  std::uint64_t cache_[2];
  int avail_ = 0;
};

}  // namespace batchtail
