#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace sdecert {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
///
/// Stateless: the same (counter, key) always maps to the same 128 output bits,
/// which is what makes streams splittable and replayable.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

/// splitmix64 finalizer; used to derive independent per-purpose seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for a named sub-computation, e.g. derive_seed(master, "pairs").
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t purpose) noexcept;

namespace seed_purpose {
inline constexpr std::uint64_t kFiniteTime = 0x46494e4954450001ULL;
inline constexpr std::uint64_t kPairs = 0x5041495253000002ULL;
inline constexpr std::uint64_t kCoupling = 0x434f55504c000003ULL;
inline constexpr std::uint64_t kTail = 0x5441494c00000004ULL;
inline constexpr std::uint64_t kTailCoupling = 0x5441494c43000005ULL;
inline constexpr std::uint64_t kDensity = 0x44454e5349000006ULL;
}  // namespace seed_purpose

/// Deterministic Gaussian/uniform source keyed by (master_seed, stream_id).
///
/// The Philox key is the master seed; the 128-bit counter is (block, stream_id),
/// so distinct stream ids never share a counter value. A stream replayed from the
/// same (seed, id, counter) reproduces its draws bit-for-bit as long as the
/// sequence of normal()/uniform() calls is the same.
class NoiseStream {
 public:
  NoiseStream() = default;
  NoiseStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint64_t counter = 0) noexcept;

  /// Standard normal via Box–Muller on two 53-bit uniforms.
  double normal() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;

  void fill_normal(Eigen::Ref<Eigen::VectorXd> out) noexcept;
  void fill_normal(Eigen::Ref<Eigen::VectorXd> out, double scale) noexcept;

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of Philox blocks consumed so far.
  std::uint64_t counter() const noexcept { return block_; }

 private:
  std::uint32_t next_word() noexcept;
  double next_unit() noexcept;

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sdecert
