#pragma once

#include <array>
#include <cstdint>

namespace bolab {

/// Philox4x32-10 block function (Salmon et al., Random123).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// SplitMix64 finalizer; used to derive independent seeds from (seed, tag).
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

/// Counter-based random stream.
///
/// A stream is identified by (seed, stream id). Draws are addressed by a
/// (slot, draw) pair and are pure functions of (seed, stream, slot, draw), so
/// e.g. mode n of sample i is reproducible regardless of which worker computes it
/// or in which order. Sequential draws (`next_*`) use a reserved slot.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Two 64-bit words for (slot, draw).
  std::array<std::uint64_t, 2> bits(std::uint32_t slot, std::uint32_t draw) const noexcept;

  /// Uniform in (0, 1]; safe for log().
  static double to_open_unit(std::uint64_t bits) noexcept;
  /// Uniform in [0, 1).
  static double to_unit(std::uint64_t bits) noexcept;

  double next_unit() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) noexcept;

  static constexpr std::uint32_t kSequentialSlot = 0xFFFFFFFFu;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  PhiloxKey key_;
  std::uint64_t position_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  bool buffered_ = false;
};

}  // namespace bolab
