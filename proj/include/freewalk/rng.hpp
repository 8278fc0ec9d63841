#pragma once

// Counter-based generator: Philox4x32-10, identified in outputs as
// "philox4x32-10/v1".  A stream is the 128-bit counter space
// {block_lo, block_hi, stream_lo, stream_hi} under key = 64-bit seed, so
// distinct streams never overlap and any stream can be opened in isolation.

#include <array>
#include <cstdint>

namespace freewalk {

inline constexpr const char* kRngName = "philox4x32-10/v1";

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 block.
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// What a stream is used for; packed into the top 16 bits of the stream id.
enum class StreamPurpose : std::uint16_t {
  walk = 1,
  hyperplanes = 2,
  proximality_probe = 3,
  test = 15,
};

/// stream id = purpose:16 | index:16 | rep:32.
constexpr std::uint64_t stream_id(StreamPurpose purpose, std::uint16_t index, std::uint32_t rep) {
  return (static_cast<std::uint64_t>(purpose) << 48) | (static_cast<std::uint64_t>(index) << 32) | rep;
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();  // two consecutive u32 words, low word first
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller, two u64 draws).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t words_used() const { return used_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  unsigned pos_ = 4;
  std::uint64_t used_ = 0;
};

}  // namespace freewalk
