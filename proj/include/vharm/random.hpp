#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace vharm {

/// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter counter, Key key);
};

struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  static constexpr std::string_view algorithm = "philox4x32-10";
};

/// Stream of uniforms and standard normals for one (seed, stream) pair.
/// The n-th draw depends only on (seed, stream, n).
class RandomStream {
 public:
  explicit RandomStream(RngSpec spec);
  RandomStream(std::uint64_t seed, std::uint64_t stream) : RandomStream(RngSpec{seed, stream}) {}

  /// Uniform on the open interval (0,1) with 53 random bits.
  double uniform();
  double normal();
  std::uint64_t next_u64();

 private:
  void refill();

  Philox4x32::Key key_{};
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // unread 64-bit words left in buffer_
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vharm
