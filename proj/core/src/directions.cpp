#include "zofd/directions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "op_count.hpp"
#include "zofd/errors.hpp"

namespace zofd {

namespace {

struct KindName {
  DirectionKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 9> kKindNames = {{
    {DirectionKind::gaussian, "gaussian"},
    {DirectionKind::spherical, "spherical"},
    {DirectionKind::rademacher, "rademacher"},
    {DirectionKind::coordinate, "coordinate"},
    {DirectionKind::qr_haar, "qr_haar"},
    {DirectionKind::butterfly, "butterfly"},
    {DirectionKind::householder, "householder"},
    {DirectionKind::perm_householder, "perm_householder"},
    {DirectionKind::stiefel, "stiefel"},
}};

void check_dims(int d, int ell) {
  if (d < 1 || ell < 1 || ell > d) {
    throw DimensionError("direction matrix needs 1 <= ell <= d (got d=" + std::to_string(d) +
                         ", ell=" + std::to_string(ell) + ")");
  }
}

Eigen::MatrixXd gaussian_matrix(int d, int ell, RngStream& rng) {
  Eigen::MatrixXd a(d, ell);
  for (int j = 0; j < ell; ++j) {
    for (int i = 0; i < d; ++i) a(i, j) = rng.normal();
  }
  return a;
}

// Normalised Gaussian vector; a zero draw (probability zero) is redrawn.
void fill_unit_vector(Eigen::Ref<Eigen::VectorXd> v, RngStream& rng) {
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  v /= norm;
  ZOFD_COUNT_MULS(2 * v.size());
}

int largest_power_of_two_at_most(int d) {
  int p = 1;
  while (p <= d / 2) p *= 2;
  return p;
}

}  // namespace

std::string_view to_string(DirectionKind kind) noexcept {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

DirectionKind parse_direction_kind(std::string_view name) {
  for (const auto& entry : kKindNames) {
    if (entry.name == name) return entry.kind;
  }
  throw ParameterError("unknown direction kind '" + std::string(name) + "'");
}

bool is_structured(DirectionKind kind) noexcept {
  switch (kind) {
    case DirectionKind::gaussian:
    case DirectionKind::spherical:
    case DirectionKind::rademacher:
      return false;
    default:
      return true;
  }
}

DirectionMatrix::DirectionMatrix(Eigen::MatrixXd columns, DirectionKind kind)
    : columns_(std::move(columns)), kind_(kind) {
  check_dims(static_cast<int>(columns_.rows()), static_cast<int>(columns_.cols()));
}

double orthonormality_defect(const Eigen::MatrixXd& p) {
  const Eigen::Index ell = p.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(ell, ell);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(p.transpose());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < ell; ++j) {
    for (Eigen::Index i = j; i < ell; ++i) {
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(gram(i, j) - target));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// ButterflyTransform

ButterflyTransform::ButterflyTransform(int d, RngStream& rng)
    : dim_(d), block_(d >= 1 ? largest_power_of_two_at_most(d) : 0) {
  if (d < 1) throw DimensionError("butterfly dimension must be positive");
  int levels = 0;
  while ((1 << levels) < block_) ++levels;
  angles_.reserve(static_cast<std::size_t>(levels));
  for (int m = 0; m < levels; ++m) angles_.push_back(2.0 * std::numbers::pi * rng.uniform());
  for (double t : angles_) {
    cos_.push_back(std::cos(t));
    sin_.push_back(std::sin(t));
  }
}

ButterflyTransform::ButterflyTransform(int d, std::vector<double> angles)
    : dim_(d), block_(d >= 1 ? largest_power_of_two_at_most(d) : 0), angles_(std::move(angles)) {
  if (d < 1) throw DimensionError("butterfly dimension must be positive");
  if ((std::size_t{1} << angles_.size()) != static_cast<std::size_t>(block_)) {
    throw DimensionError("butterfly needs log2(block) angles for d=" + std::to_string(d));
  }
  for (double t : angles_) {
    cos_.push_back(std::cos(t));
    sin_.push_back(std::sin(t));
  }
}

void ButterflyTransform::apply(std::span<double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) {
    throw DimensionError("butterfly apply: vector size mismatch");
  }
  for (std::size_t m = 0; m < angles_.size(); ++m) {
    const std::size_t stride = std::size_t{1} << m;
    const double c = cos_[m];
    const double s = sin_[m];
    for (std::size_t base = 0; base < static_cast<std::size_t>(block_); base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const double lo = x[i];
        const double hi = x[i + stride];
        x[i] = c * lo + s * hi;
        x[i + stride] = -s * lo + c * hi;
      }
    }
    ZOFD_COUNT_MULS(2 * block_);
  }
}

void ButterflyTransform::column(int j, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(dim_) || j < 0 || j >= dim_) {
    throw DimensionError("butterfly column: index or size out of range");
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (j >= block_) {
    out[static_cast<std::size_t>(j)] = 1.0;
    return;
  }
  // Column j of R(t_n) (x) ... (x) R(t_1) is a Kronecker product of one
  // column of each 2x2 factor; expand from the innermost level outwards.
  out[0] = 1.0;
  std::size_t len = 1;
  for (std::size_t m = 0; m < angles_.size(); ++m) {
    const bool bit = ((j >> m) & 1) != 0;
    const double top = bit ? sin_[m] : cos_[m];
    const double bottom = bit ? cos_[m] : -sin_[m];
    for (std::size_t i = 0; i < len; ++i) {
      out[len + i] = bottom * out[i];
      out[i] = top * out[i];
    }
    ZOFD_COUNT_MULS(2 * len);
    len *= 2;
  }
}

Eigen::VectorXd ButterflyTransform::column(int j) const {
  Eigen::VectorXd out(dim_);
  column(j, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Eigen::MatrixXd ButterflyTransform::dense() const {
  Eigen::MatrixXd g(dim_, dim_);
  for (int j = 0; j < dim_; ++j) g.col(j) = column(j);
  return g;
}

// ---------------------------------------------------------------------------
// Generators

DirectionMatrix gen_gaussian(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  return DirectionMatrix(gaussian_matrix(d, ell, rng), DirectionKind::gaussian);
}

DirectionMatrix gen_spherical(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  Eigen::MatrixXd p(d, ell);
  for (int j = 0; j < ell; ++j) fill_unit_vector(p.col(j), rng);
  return DirectionMatrix(std::move(p), DirectionKind::spherical);
}

DirectionMatrix gen_rademacher(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  Eigen::MatrixXd p(d, ell);
  for (int j = 0; j < ell; ++j) {
    for (int i = 0; i < d; ++i) p(i, j) = rng.coin() ? 1.0 : -1.0;
  }
  return DirectionMatrix(std::move(p), DirectionKind::rademacher);
}

DirectionMatrix gen_coordinate(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  const std::vector<int> picked = sample_without_replacement(d, ell, rng);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, ell);
  for (int j = 0; j < ell; ++j) p(picked[static_cast<std::size_t>(j)], j) = 1.0;
  return DirectionMatrix(std::move(p), DirectionKind::coordinate);
}

DirectionMatrix gen_qr_haar(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Eigen::MatrixXd a = gaussian_matrix(d, ell, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::VectorXd r_diag = qr.matrixQR().diagonal();
    if ((r_diag.array() == 0.0).any()) continue;
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, ell);
    for (int j = 0; j < ell; ++j) {
      if (r_diag[j] < 0.0) q.col(j) = -q.col(j);
    }
    return DirectionMatrix(std::move(q), DirectionKind::qr_haar);
  }
  throw DegenerateSampleError("qr_haar: Gaussian sample rank-deficient twice");
}

DirectionMatrix gen_butterfly(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  const ButterflyTransform transform(d, rng);
  const std::vector<int> picked = sample_without_replacement(d, ell, rng);
  Eigen::MatrixXd p(d, ell);
  for (int j = 0; j < ell; ++j) {
    transform.column(picked[static_cast<std::size_t>(j)],
                     std::span<double>(p.col(j).data(), static_cast<std::size_t>(d)));
  }
  return DirectionMatrix(std::move(p), DirectionKind::butterfly);
}

DirectionMatrix householder_columns(const Eigen::VectorXd& v, std::span<const int> indices,
                                    DirectionKind kind) {
  const auto d = v.size();
  const auto ell = static_cast<Eigen::Index>(indices.size());
  check_dims(static_cast<int>(d), static_cast<int>(ell));
  Eigen::MatrixXd p(d, ell);
  for (Eigen::Index j = 0; j < ell; ++j) {
    const int i = indices[static_cast<std::size_t>(j)];
    if (i < 0 || i >= d) throw DimensionError("householder column index out of range");
    const double scale = -2.0 * v[i];
    p.col(j) = scale * v;
    p(i, j) += 1.0;
    ZOFD_COUNT_MULS(d + 1);
  }
  return DirectionMatrix(std::move(p), kind);
}

DirectionMatrix gen_householder(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  Eigen::VectorXd v(d);
  fill_unit_vector(v, rng);
  std::vector<int> first(static_cast<std::size_t>(ell));
  for (int j = 0; j < ell; ++j) first[static_cast<std::size_t>(j)] = j;
  return householder_columns(v, first, DirectionKind::householder);
}

DirectionMatrix gen_perm_householder(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  Eigen::VectorXd v(d);
  fill_unit_vector(v, rng);
  const std::vector<int> picked = sample_without_replacement(d, ell, rng);
  return householder_columns(v, picked, DirectionKind::perm_householder);
}

DirectionMatrix gen_stiefel(int d, int ell, RngStream& rng) {
  check_dims(d, ell);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Eigen::MatrixXd a = gaussian_matrix(d, ell, rng);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(ell, ell);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) continue;
    const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
    if (!(lambda[ell - 1] > 0.0) || lambda[0] < 1e-12 * lambda[ell - 1]) continue;
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const Eigen::MatrixXd inv_sqrt =
        v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
    Eigen::MatrixXd q = a * inv_sqrt;
    // The eigen route loses about cond(A)^2 * eps of orthogonality; a few
    // Newton-Schulz steps Q <- Q (3I - Q^T Q) / 2 restore it quadratically.
    for (int step = 0; step < 4; ++step) {
      const Eigen::MatrixXd qtq = q.transpose() * q;
      const double defect = (qtq - Eigen::MatrixXd::Identity(ell, ell)).cwiseAbs().maxCoeff();
      if (defect <= 1e-14 || !(defect < 0.5)) break;
      q = 1.5 * q - 0.5 * (q * qtq);
    }
    return DirectionMatrix(std::move(q), DirectionKind::stiefel);
  }
  throw DegenerateSampleError("stiefel: A^T A numerically singular twice");
}

DirectionMatrix generate(DirectionKind kind, int d, int ell, RngStream& rng) {
  switch (kind) {
    case DirectionKind::gaussian:
      return gen_gaussian(d, ell, rng);
    case DirectionKind::spherical:
      return gen_spherical(d, ell, rng);
    case DirectionKind::rademacher:
      return gen_rademacher(d, ell, rng);
    case DirectionKind::coordinate:
      return gen_coordinate(d, ell, rng);
    case DirectionKind::qr_haar:
      return gen_qr_haar(d, ell, rng);
    case DirectionKind::butterfly:
      return gen_butterfly(d, ell, rng);
    case DirectionKind::householder:
      return gen_householder(d, ell, rng);
    case DirectionKind::perm_householder:
      return gen_perm_householder(d, ell, rng);
    case DirectionKind::stiefel:
      return gen_stiefel(d, ell, rng);
  }
  throw ParameterError("unhandled direction kind");
}

// ---------------------------------------------------------------------------
// DirectionSampler

DirectionSampler::DirectionSampler(DirectionKind kind, int d, int ell, bool cache_identity)
    : kind_(kind), d_(d), ell_(ell) {
  check_dims(d, ell);
  if (cache_identity && kind == DirectionKind::coordinate && ell == d) {
    cached_.emplace(Eigen::MatrixXd::Identity(d, d), DirectionKind::coordinate);
  }
}

const DirectionMatrix& DirectionSampler::sample(RngStream& rng) {
  if (cached_) return *cached_;
  last_.emplace(generate(kind_, d_, ell_, rng));
  return *last_;
}

}  // namespace zofd
