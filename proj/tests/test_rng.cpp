#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "zofd/rng.hpp"

using zofd::RngStream;

TEST_CASE("equal seed and stream id reproduce the sequence") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(a() == b());
    REQUIRE(a.normal() == b.normal());
    REQUIRE(a.uniform() == b.uniform());
  }
}

TEST_CASE("stream id and seed both separate sequences") {
  RngStream base(42, 7);
  RngStream other_stream(42, 8);
  RngStream other_seed(43, 7);
  int same_stream = 0;
  int same_seed = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = base();
    same_stream += x == other_stream() ? 1 : 0;
    same_seed += x == other_seed() ? 1 : 0;
  }
  CHECK(same_stream == 0);
  CHECK(same_seed == 0);
  // high and low halves both matter
  RngStream hi(1ULL << 40, 0);
  RngStream lo(1, 0);
  CHECK(hi() != lo());
}

TEST_CASE("substream keeps the seed") {
  const RngStream a(5, 1);
  RngStream s = a.substream(99);
  RngStream t(5, 99);
  CHECK(s.seed() == 5);
  CHECK(s.stream_id() == 99);
  CHECK(s() == t());
}

TEST_CASE("uniform lies in [0, 1) with mean 1/2") {
  RngStream rng(1, 2);
  const int n = 1000000;
  double sum = 0;
  double lo = 1;
  double hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(lo < 1e-4);
  CHECK(hi > 1 - 1e-4);
}

TEST_CASE("normal has mean 0, variance 1 and kurtosis 3") {
  RngStream rng(3, 4);
  const int n = 1000000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 4 / std::sqrt(double(n)));
  CHECK(std::abs(m2 - 1) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 - 3) < 4 * std::sqrt(96.0 / n));
}

TEST_CASE("below(n) is uniform on {0..n-1}") {
  RngStream rng(5, 6);
  const std::size_t k = 7;
  const int n = 700000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(k);
    REQUIRE(v < k);
    counts[v]++;
  }
  double chi2 = 0;
  const double expected = double(n) / k;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 22.46);  // chi-square, 6 dof, p = 0.001
  CHECK(rng.below(1) == 0);
}

TEST_CASE("sample_without_replacement gives distinct, uniformly chosen indices") {
  RngStream rng(7, 8);
  const int n = 10, count = 4, reps = 100000;
  std::vector<int> hits(n, 0);
  for (int r = 0; r < reps; ++r) {
    const auto s = zofd::sample_without_replacement(n, count, rng);
    REQUIRE(s.size() == std::size_t(count));
    REQUIRE(std::set<int>(s.begin(), s.end()).size() == std::size_t(count));
    for (int i : s) {
      REQUIRE(i >= 0);
      REQUIRE(i < n);
      hits[i]++;
    }
  }
  const double p = double(count) / n;
  const double se = std::sqrt(p * (1 - p) / reps);
  for (int h : hits) CHECK(std::abs(double(h) / reps - p) < 4 * se);

  const auto all = zofd::sample_without_replacement(5, 5, rng);
  CHECK(std::set<int>(all.begin(), all.end()) == std::set<int>{0, 1, 2, 3, 4});
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(zofd::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(zofd::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(zofd::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("derive_stream_id separates parts") {
  CHECK(zofd::derive_stream_id({"ab", "c"}) != zofd::derive_stream_id({"a", "bc"}));
  CHECK(zofd::derive_stream_id({"x", "1"}) == zofd::derive_stream_id({"x", "1"}));
  CHECK(zofd::derive_stream_id({"x", "1"}) != zofd::derive_stream_id({"x", "2"}));
}
