#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "zofd/directions.hpp"
#include "zofd/errors.hpp"

using namespace zofd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("kind names round-trip and unknown names are rejected") {
  for (DirectionKind k : kAllDirectionKinds) CHECK(parse_direction_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_direction_kind("qr"), ParameterError);
  CHECK_FALSE(is_structured(DirectionKind::gaussian));
  CHECK(is_structured(DirectionKind::stiefel));
}

TEST_CASE("every generator returns d x ell and rejects bad dimensions") {
  auto rng = test::stream(1);
  for (DirectionKind k : kAllDirectionKinds) {
    CAPTURE(to_string(k));
    const DirectionMatrix p = generate(k, 3, 2, rng);
    CHECK(p.dim() == 3);
    CHECK(p.ell() == 2);
    CHECK(p.kind() == k);
    CHECK_THROWS_AS(generate(k, 3, 0, rng), DimensionError);
    CHECK_THROWS_AS(generate(k, 3, 4, rng), DimensionError);
    CHECK_THROWS_AS(generate(k, 0, 1, rng), DimensionError);
  }
}

TEST_CASE("equal streams give bit-identical matrices") {
  for (DirectionKind k : kAllDirectionKinds) {
    CAPTURE(to_string(k));
    auto a = test::stream(77);
    auto b = test::stream(77);
    const MatrixXd pa = generate(k, 17, 6, a).matrix();
    const MatrixXd pb = generate(k, 17, 6, b).matrix();
    CHECK(std::equal(pa.data(), pa.data() + pa.size(), pb.data()));
  }
}

TEST_CASE("gaussian entries have mean 0 and E||g||^2 = d") {
  auto rng = test::stream(2);
  double sum = 0;
  long n = 0;
  for (int r = 0; r < 200; ++r) {
    const MatrixXd p = gen_gaussian(100, 50, rng).matrix();
    sum += p.sum();
    n += p.size();
  }
  CHECK(n == 1000000);
  CHECK(std::abs(sum / n) <= 4.0 / std::sqrt(double(n)));

  double norm_sq = 0;
  for (int r = 0; r < 10000; ++r) norm_sq += gen_gaussian(100, 1, rng).matrix().squaredNorm();
  CHECK(std::abs(norm_sq / 10000 - 100) < 2.0);
}

TEST_CASE("spherical columns are unit vectors with isotropic second moment") {
  auto rng = test::stream(3);
  const DirectionMatrix p = gen_spherical(40, 25, rng);
  for (Eigen::Index j = 0; j < p.ell(); ++j) CHECK(std::abs(p.column(j).norm() - 1) <= 1e-12);

  const int n = 100000;
  MatrixXd m = MatrixXd::Zero(5, 5);
  for (int r = 0; r < n; ++r) {
    const VectorXd v = gen_spherical(5, 1, rng).column(0);
    m += v * v.transpose();
  }
  m /= n;
  CHECK((m - MatrixXd::Identity(5, 5) / 5).cwiseAbs().maxCoeff() <= 0.01);

  for (int r = 0; r < 20; ++r) CHECK(std::abs(gen_spherical(1, 1, rng).matrix()(0, 0)) == 1.0);
}

TEST_CASE("rademacher entries are +-1") {
  auto rng = test::stream(4);
  const MatrixXd p = gen_rademacher(30, 12, rng).matrix();
  CHECK(p.cwiseAbs().minCoeff() == 1.0);
  CHECK(p.cwiseAbs().maxCoeff() == 1.0);
  for (Eigen::Index j = 0; j < p.cols(); ++j) CHECK(p.col(j).squaredNorm() == 30.0);

  double sum = 0;
  for (int r = 0; r < 1000; ++r) sum += gen_rademacher(100, 10, rng).matrix().sum();
  CHECK(std::abs(sum / 1e6) <= 4.0 / 1000);
}

TEST_CASE("coordinate directions are distinct basis vectors chosen uniformly") {
  auto rng = test::stream(5);
  for (int r = 0; r < 20; ++r) {
    const MatrixXd p = gen_coordinate(2, 2, rng).matrix();
    const bool identity = p.isApprox(MatrixXd::Identity(2, 2));
    const bool swap = p(0, 1) == 1.0 && p(1, 0) == 1.0 && p(0, 0) == 0.0 && p(1, 1) == 0.0;
    CHECK((identity || swap));
  }
  const MatrixXd p = gen_coordinate(9, 5, rng).matrix();
  CHECK(p.transpose() * p == MatrixXd::Identity(5, 5));

  const int n = 100000;
  std::vector<int> hits(4, 0);
  for (int r = 0; r < n; ++r) {
    const MatrixXd q = gen_coordinate(4, 2, rng).matrix();
    for (int i = 0; i < 4; ++i) hits[i] += q.row(i).sum() == 1.0 ? 1 : 0;
  }
  for (int h : hits) CHECK(std::abs(double(h) / n - 0.5) <= 0.01);
}

TEST_CASE("qr_haar: P R reproduces the Gaussian draw with R_jj > 0") {
  for (auto [d, ell] : {std::pair{6, 3}, std::pair{5, 5}, std::pair{40, 17}}) {
    auto a = test::stream(600 + d);
    auto b = test::stream(600 + d);
    const MatrixXd p = gen_qr_haar(d, ell, a).matrix();
    const MatrixXd g = gen_gaussian(d, ell, b).matrix();  // same draws, same order
    CHECK(test::gram_defect(p) <= 1e-10);
    const MatrixXd r = p.transpose() * g;
    for (int j = 0; j < ell; ++j) {
      CHECK(r(j, j) > 0);
      for (int i = j + 1; i < ell; ++i) CHECK(std::abs(r(i, j)) <= 1e-10);
    }
    CHECK((p * r - g).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("qr_haar at d = 1 is +-1 with equal probability") {
  auto rng = test::stream(7);
  int plus = 0;
  const int n = 20000;
  for (int r = 0; r < n; ++r) {
    const double v = gen_qr_haar(1, 1, rng).matrix()(0, 0);
    REQUIRE(std::abs(v) == 1.0);
    plus += v > 0 ? 1 : 0;
  }
  CHECK(std::abs(double(plus) / n - 0.5) < 4 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("qr_haar first column is uniform on the sphere (d = 4)") {
  auto rng = test::stream(8);
  const int n = 100000;
  VectorXd mean = VectorXd::Zero(4);
  MatrixXd second = MatrixXd::Zero(4, 4);
  for (int r = 0; r < n; ++r) {
    const VectorXd v = gen_qr_haar(4, 1, rng).column(0);
    mean += v;
    second += v * v.transpose();
  }
  mean /= n;
  second /= n;
  CHECK(mean.cwiseAbs().maxCoeff() <= 0.02);
  CHECK((second - MatrixXd::Identity(4, 4) / 4).cwiseAbs().maxCoeff() <= 0.01);
}

TEST_CASE("butterfly transform matches the Kronecker construction") {
  for (int d : {1, 2, 4, 5, 8, 13, 16}) {
    CAPTURE(d);
    auto rng = test::stream(900 + d);
    const ButterflyTransform t(d, rng);
    MatrixXd expected = MatrixXd::Identity(d, d);
    const MatrixXd g = test::butterfly_kron(t.angles());
    REQUIRE(g.rows() == t.block());
    expected.topLeftCorner(t.block(), t.block()) = g;
    CHECK((t.dense() - expected).cwiseAbs().maxCoeff() <= 1e-14);

    VectorXd x = VectorXd::LinSpaced(d, -1.0, 2.0);
    const VectorXd want = expected * x;
    t.apply(std::span<double>(x.data(), std::size_t(d)));
    CHECK((x - want).cwiseAbs().maxCoeff() <= 1e-13);
    for (int j = 0; j < d; ++j) CHECK((t.column(j) - expected.col(j)).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("butterfly at d = 2 is a rotation [[c, s], [-s, c]] up to column order") {
  const double theta = 0.7;
  const ButterflyTransform t(2, std::vector<double>{theta});
  MatrixXd want(2, 2);
  want << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  CHECK((t.dense() - want).cwiseAbs().maxCoeff() <= 1e-15);

  auto a = test::stream(31);
  auto b = test::stream(31);
  const MatrixXd p = gen_butterfly(2, 2, a).matrix();
  const ButterflyTransform replay(2, b);
  const MatrixXd g = test::butterfly_kron(replay.angles());
  const bool same = (p - g).cwiseAbs().maxCoeff() <= 1e-15;
  MatrixXd swapped(2, 2);
  swapped << g.col(1), g.col(0);
  const bool flipped = (p - swapped).cwiseAbs().maxCoeff() <= 1e-15;
  CHECK((same || flipped));
}

TEST_CASE("butterfly columns are orthonormal and the padding gives basis vectors") {
  auto rng = test::stream(10);
  CHECK(test::gram_defect(gen_butterfly(8, 8, rng).matrix()) <= 1e-12);

  // d = 5: block 4 plus one identity column (index 4 = e_5).
  int seen_pad = 0;
  for (int r = 0; r < 200; ++r) {
    const MatrixXd p = gen_butterfly(5, 3, rng).matrix();
    REQUIRE(test::gram_defect(p) <= 1e-12);
    for (int j = 0; j < 3; ++j) {
      if (std::abs(p(4, j)) == 1.0) {
        ++seen_pad;
        CHECK(p.col(j).head(4).cwiseAbs().maxCoeff() == 0.0);
      } else {
        CHECK(p(4, j) == 0.0);
      }
    }
  }
  CHECK(seen_pad > 0);
}

TEST_CASE("householder columns are e_i - 2 v_i v") {
  const VectorXd e1 = VectorXd::Unit(3, 0);
  const std::vector<int> first = {0, 1};
  const MatrixXd p = householder_columns(e1, first, DirectionKind::householder).matrix();
  MatrixXd want(3, 2);
  want << -1, 0, 0, 1, 0, 0;
  CHECK(p == want);

  auto rng = test::stream(11);
  CHECK(test::gram_defect(gen_householder(50, 20, rng).matrix()) <= 1e-12);
  for (int r = 0; r < 10; ++r) CHECK(std::abs(gen_householder(2, 2, rng).matrix().determinant() + 1) <= 1e-12);

  const std::vector<int> third = {2};
  const MatrixXd q = householder_columns(VectorXd::Unit(4, 0), third, DirectionKind::perm_householder).matrix();
  CHECK(q == MatrixXd(VectorXd::Unit(4, 2)));
}

TEST_CASE("gen_householder returns the first ell columns of I - 2 v v^T") {
  auto a = test::stream(12);
  auto b = test::stream(12);
  const MatrixXd p = gen_householder(7, 4, a).matrix();
  const VectorXd v = gen_spherical(7, 1, b).column(0);  // same unit-vector draw
  const MatrixXd h = MatrixXd::Identity(7, 7) - 2 * v * v.transpose();
  CHECK((p - h.leftCols(4)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("perm_householder picks columns of the same reflector uniformly") {
  auto find_columns = [](const MatrixXd& p, const MatrixXd& h) {
    std::vector<int> idx;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      for (Eigen::Index i = 0; i < h.cols(); ++i) {
        if ((p.col(j) - h.col(i)).cwiseAbs().maxCoeff() <= 1e-14) idx.push_back(int(i));
      }
    }
    return idx;
  };

  {
    auto a = test::stream(13);
    auto b = test::stream(13);
    const MatrixXd p = gen_perm_householder(3, 3, a).matrix();
    const MatrixXd h = gen_householder(3, 3, b).matrix();
    CHECK(test::gram_defect(p) <= 1e-12);
    const auto idx = find_columns(p, h);
    CHECK(std::set<int>(idx.begin(), idx.end()) == std::set<int>{0, 1, 2});
  }

  const int n = 100000;
  std::vector<int> hits(6, 0);
  for (int r = 0; r < n; ++r) {
    auto a = test::stream(100000 + r);
    auto b = test::stream(100000 + r);
    const auto idx = find_columns(gen_perm_householder(6, 2, a).matrix(), gen_householder(6, 6, b).matrix());
    REQUIRE(idx.size() == 2);
    for (int i : idx) hits[i]++;
  }
  for (int h : hits) CHECK(std::abs(double(h) / n - 1.0 / 3) <= 0.01);
}

TEST_CASE("stiefel is the polar factor of the Gaussian draw") {
  for (auto [d, ell] : {std::pair{3, 2}, std::pair{10, 10}, std::pair{30, 7}}) {
    auto a = test::stream(1300 + d);
    auto b = test::stream(1300 + d);
    const MatrixXd p = gen_stiefel(d, ell, a).matrix();
    const MatrixXd g = gen_gaussian(d, ell, b).matrix();
    CHECK(test::gram_defect(p) <= 1e-8);
    // polar factor U V^T from the SVD
    Eigen::JacobiSVD<MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
    CHECK((p - polar).cwiseAbs().maxCoeff() <= 1e-10);
    // span(P) = span(A)
    CHECK((g - p * (p.transpose() * g)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  auto rng = test::stream(14);
  for (int r = 0; r < 10; ++r) CHECK(std::abs(gen_stiefel(1, 1, rng).matrix()(0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("orthonormality holds for structured kinds on small and odd sizes") {
  auto rng = test::stream(15);
  for (DirectionKind k : kStructuredKinds) {
    for (int d : {1, 2, 3, 8, 17, 33}) {
      for (int ell : {1, 2, (d + 2) / 3, (d + 1) / 2, d}) {
        if (ell > d) continue;
        CAPTURE(to_string(k));
        CAPTURE(d);
        CAPTURE(ell);
        const MatrixXd p = generate(k, d, ell, rng).matrix();
        CHECK(test::gram_defect(p) <= 1e-10);
        CHECK(orthonormality_defect(p) == doctest::Approx(test::gram_defect(p)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("single columns are isotropic: E[p p^T] = I/d") {
  // Pooled second moment of one column per draw (all d columns of the full
  // reflector for householder). Entries are tested jointly with a Sidak
  // bound so the whole table has the level of one 3-sigma test.
  const int n = 100000;
  const std::vector<std::pair<DirectionKind, int>> cases = {
      {DirectionKind::spherical, 5},  {DirectionKind::qr_haar, 6},
      {DirectionKind::householder, 4}, {DirectionKind::perm_householder, 6},
      {DirectionKind::butterfly, 8},  {DirectionKind::butterfly, 5},
      {DirectionKind::stiefel, 6}};
  int entries = 0;
  for (const auto& c : cases) entries += c.second * (c.second + 1) / 2;
  const double z = test::sidak_z(entries);

  for (const auto& [kind, d] : cases) {
    CAPTURE(to_string(kind));
    CAPTURE(d);
    auto rng = test::stream(1500 + static_cast<int>(kind) * 10 + d);
    const int ell = kind == DirectionKind::householder ? d : 1;
    MatrixXd s1 = MatrixXd::Zero(d, d);
    MatrixXd s2 = MatrixXd::Zero(d, d);
    for (int r = 0; r < n; ++r) {
      const MatrixXd p = generate(kind, d, ell, rng).matrix();
      const MatrixXd m = p * p.transpose() / ell;
      s1 += m;
      s2 += m.cwiseProduct(m);
    }
    const MatrixXd mean = s1 / n;
    const MatrixXd var = (s2 / n - mean.cwiseProduct(mean)) * (double(n) / (n - 1));
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k <= i; ++k) {
        const double target = i == k ? 1.0 / d : 0.0;
        const double se = std::sqrt(std::max(var(i, k), 0.0) / n);
        CHECK(std::abs(mean(i, k) - target) <= z * se + 1e-12);
      }
    }
  }
}

TEST_CASE("DirectionSampler caches the identity for full coordinate directions") {
  DirectionSampler cached(DirectionKind::coordinate, 6, 6);
  CHECK(cached.uses_cache());
  auto rng = test::stream(16);
  auto untouched = test::stream(16);
  CHECK(cached.sample(rng).matrix() == MatrixXd::Identity(6, 6));
  CHECK(rng() == untouched());  // no draws consumed

  DirectionSampler fresh(DirectionKind::coordinate, 6, 6, /*cache_identity=*/false);
  CHECK_FALSE(fresh.uses_cache());
  DirectionSampler partial(DirectionKind::coordinate, 6, 3);
  CHECK_FALSE(partial.uses_cache());

  DirectionSampler q(DirectionKind::qr_haar, 5, 2);
  const MatrixXd first = q.sample(rng).matrix();
  CHECK(first != q.sample(rng).matrix());
}

TEST_CASE("direction dump round-trips exactly") {
  auto rng = test::stream(17);
  const DirectionMatrix p = gen_stiefel(5, 3, rng);
  std::stringstream ss;
  write_direction_csv(ss, p, 1234);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "d,ell,kind,seed");
  ss.seekg(0);
  const DirectionDump back = read_direction_csv(ss);
  CHECK(back.seed == 1234);
  CHECK(back.matrix.kind() == DirectionKind::stiefel);
  CHECK(back.matrix.matrix() == p.matrix());

  std::stringstream bad("d,ell,kind,seed\n3,2,qr_haar,0\n1,2\n");
  CHECK_THROWS(read_direction_csv(bad));
}
