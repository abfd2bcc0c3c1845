#include "batchtail/rng.hpp"

#include "batchtail/math.hpp"

namespace batchtail {

namespace {

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  constexpr std::uint64_t m0 = 0xD2511F53ull;
  constexpr std::uint64_t m1 = 0xCD9E8D57ull;
  const std::uint64_t p0 = m0 * ctr[0];
  const std::uint64_t p1 = m1 * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t c1 = ctr[1], c3 = ctr[3];
  ctr[0] = hi1 ^ c1 ^ key[0];
  ctr[1] = lo1;
  ctr[2] = hi0 ^ c3 ^ key[1];
  ctr[3] = lo0;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

void Philox4x32::round10(std::uint32_t ctr[4], std::uint32_t key[2]) {
  constexpr std::uint32_t w0 = 0x9E3779B9u;
  constexpr std::uint32_t w1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, key);
    key[0] += w0;
    key[1] += w1;
  }
}

std::uint64_t make_stream(StreamKind kind, unsigned stage, unsigned attempt) {
  return (static_cast<std::uint64_t>(kind) << 56) |
         (static_cast<std::uint64_t>(stage & 0xFFu) << 48) |
         (static_cast<std::uint64_t>(attempt & 0xFFFFu) << 32);
}

CounterRng::CounterRng(RngStream s, std::uint64_t index) {
  const std::uint64_t k = splitmix64(s.seed ^ splitmix64(s.stream));
  key_[0] = static_cast<std::uint32_t>(k);
  key_[1] = static_cast<std::uint32_t>(k >> 32);
  base_[0] = static_cast<std::uint32_t>(index);
  base_[1] = static_cast<std::uint32_t>(index >> 32);
}

void CounterRng::refill() {
  std::uint32_t ctr[4] = {base_[0], base_[1], static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32)};
  std::uint32_t key[2] = {key_[0], key_[1]};
  Philox4x32::round10(ctr, key);
  cache_[0] = (static_cast<std::uint64_t>(ctr[0]) << 32) | ctr[1];
  cache_[1] = (static_cast<std::uint64_t>(ctr[2]) << 32) | ctr[3];
  avail_ = 2;
  ++block_;
}

std::uint64_t CounterRng::next_u64() {
  if (avail_ == 0) refill();
  return cache_[--avail_];
}

double CounterRng::next_u01() {
  const std::uint64_t x = next_u64();
  return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

double CounterRng::next_normal() { return inverse_normal_cdf(next_u01()); }

}  // namespace batchtail
