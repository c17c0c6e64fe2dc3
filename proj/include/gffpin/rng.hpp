#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace gffpin {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_tag(std::string_view tag);

// Stream key for (master seed, purpose tag, replica id).
std::uint64_t derive_key(std::uint64_t master, std::string_view tag,
                         std::uint64_t replica = 0);

// Counter-based generator. Satisfies UniformRandomBitGenerator with 32-bit
// output; the full state is (key, counter) so streams never overlap.
class Rng {
 public:
  using result_type = std::uint32_t;

  explicit Rng(std::uint64_t key = 0, std::uint64_t stream_offset = 0);
  Rng(std::uint64_t master, std::string_view tag, std::uint64_t replica = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();
  std::uint64_t next_u64();
  // Uniform on the open interval (0,1).
  double uniform();
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t blocks_used() const { return counter_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t counter_;
  std::uint64_t hi_;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  boost::random::normal_distribution<double> gauss_;
};

}  // namespace gffpin
