#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace zofd {

/// Reproducible random stream identified by (seed, stream_id).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. It is seeded through std::seed_seq with the four 32-bit halves
/// of (seed, stream_id), so distinct stream ids give unrelated sequences.
/// Derived variates use fixed algorithms rather than the
/// implementation-defined std:: distributions:
///   uniform()  -- top 53 bits of one draw, scaled to [0, 1)
///   normal()   -- Box-Muller, both outputs used in order (cos, then sin)
///   below(n)   -- rejection sampling on the largest multiple of n
///
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  double uniform();
  double normal();
  std::size_t below(std::size_t n);
  bool coin() { return (engine_() >> 63) != 0; }

  /// A new independent stream sharing this stream's seed.
  RngStream substream(std::uint64_t stream_id) const { return RngStream(seed_, stream_id); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Deterministic stream id for a labelled task, e.g. {"rosenbrock", "qr_haar", "25", "3"}.
std::uint64_t derive_stream_id(const std::vector<std::string_view>& parts);

/// First `count` entries of a uniformly random permutation of {0, ..., n-1}
/// (partial Fisher-Yates).
std::vector<int> sample_without_replacement(int n, int count, RngStream& rng);

}  // namespace zofd
