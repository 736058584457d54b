#pragma once

#include <array>
#include <cstdint>

namespace weakiv {

/// Counter-based Philox4x32-10 stream (Salmon, Moraes, Dror, Shaw 2011
/// constants). A 64-bit seed keys the stream; the 128-bit counter advances
/// one block per four 32-bit outputs. Streams under distinct keys are
/// independent, which is what makes per-replication derived seeds safe to
/// run on any number of workers.
class Philox4x32 {
 public:
  explicit Philox4x32(std::uint64_t seed);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double next_double();

  /// Standard normal via Box-Muller; draws are produced in pairs and the
  /// second of each pair is cached.
  double next_normal();

  /// One raw block for a given counter/key: the primitive the stream is
  /// built on. Exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(
      const std::array<std::uint32_t, 4>& counter,
      const std::array<std::uint32_t, 2>& key);

 private:
  void refill();

  std::array<std::uint32_t, 4> counter_{{0, 0, 0, 0}};
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> block_{{0, 0, 0, 0}};
  int block_pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stream seed for replication `index` under a master seed. Splitmix64-style
/// avalanche; nearby (master, index) pairs map to unrelated seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace weakiv
