#pragma once

#include <array>
#include <cstdint>

namespace sigconc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Independent stream `stream` under `master_seed`.
///
/// Block b of the stream is Philox4x32-10 applied to the counter
/// (lo32(b), hi32(b), lo32(stream), hi32(stream)) under the key
/// (lo32(master_seed), hi32(master_seed)). Each block yields two 64-bit
/// words; normals come from Box-Muller on consecutive pairs of uniforms.
/// The output depends only on (master_seed, stream), never on scheduling.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sigconc
