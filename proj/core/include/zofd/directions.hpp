#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "zofd/rng.hpp"

namespace zofd {

enum class DirectionKind {
  gaussian,
  spherical,
  rademacher,
  coordinate,
  qr_haar,
  butterfly,
  householder,
  perm_householder,
  stiefel,
};

inline constexpr std::array<DirectionKind, 9> kAllDirectionKinds = {
    DirectionKind::gaussian,    DirectionKind::spherical,        DirectionKind::rademacher,
    DirectionKind::coordinate,  DirectionKind::qr_haar,          DirectionKind::butterfly,
    DirectionKind::householder, DirectionKind::perm_householder, DirectionKind::stiefel,
};

inline constexpr std::array<DirectionKind, 6> kStructuredKinds = {
    DirectionKind::coordinate,  DirectionKind::qr_haar,          DirectionKind::butterfly,
    DirectionKind::householder, DirectionKind::perm_householder, DirectionKind::stiefel,
};

std::string_view to_string(DirectionKind kind) noexcept;

/// Parses the exact generator tag ("qr_haar", "perm_householder", ...).
/// Throws ParameterError on an unknown name.
DirectionKind parse_direction_kind(std::string_view name);

/// True for the kinds whose columns are orthonormal.
bool is_structured(DirectionKind kind) noexcept;

/// A d x ell matrix of search directions; column i is p^(i).
class DirectionMatrix {
 public:
  DirectionMatrix(Eigen::MatrixXd columns, DirectionKind kind);

  Eigen::Index dim() const noexcept { return columns_.rows(); }
  Eigen::Index ell() const noexcept { return columns_.cols(); }
  DirectionKind kind() const noexcept { return kind_; }

  const Eigen::MatrixXd& matrix() const noexcept { return columns_; }
  auto column(Eigen::Index i) const { return columns_.col(i); }

 private:
  Eigen::MatrixXd columns_;
  DirectionKind kind_;
};

/// max_ij |(P^T P - I)_ij|.
double orthonormality_defect(const Eigen::MatrixXd& p);

/// Implicit padded butterfly matrix diag(G^(n), I_{d - 2^n}) with
/// 2^n <= d < 2^(n+1), where
///   G^(m) = [ cos(t_m) G^(m-1)   sin(t_m) G^(m-1) ]      G^(0) = [1].
///           [-sin(t_m) G^(m-1)   cos(t_m) G^(m-1) ]
/// Equivalently G^(n) = R(t_n) (x) R(t_{n-1}) (x) ... (x) R(t_1); angle t_m
/// acts on bit m-1 of the row/column index.
class ButterflyTransform {
 public:
  /// Draws one fresh angle per level, t_m ~ U[0, 2 pi).
  ButterflyTransform(int d, RngStream& rng);
  ButterflyTransform(int d, std::vector<double> angles);

  int dim() const noexcept { return dim_; }
  /// Size 2^n of the butterfly block.
  int block() const noexcept { return block_; }
  int levels() const noexcept { return static_cast<int>(angles_.size()); }
  const std::vector<double>& angles() const noexcept { return angles_; }

  /// x <- B x in place, 2 * 2^n * n multiplications.
  void apply(std::span<double> x) const;

  /// Column j of B written into `out` (size d), 2 * (2^n - 1) multiplications.
  void column(int j, std::span<double> out) const;
  Eigen::VectorXd column(int j) const;

  /// Dense d x d matrix; for tests and debugging.
  Eigen::MatrixXd dense() const;

 private:
  int dim_;
  int block_;
  std::vector<double> angles_;  // angles_[m-1] is t_m
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// Generators. Every generator requires 1 <= ell <= d and throws
// DimensionError otherwise. They draw only from `rng`, so equal
// (seed, stream_id) streams give bit-identical matrices.

/// i.i.d. N(0, 1) entries.
DirectionMatrix gen_gaussian(int d, int ell, RngStream& rng);
/// i.i.d. columns uniform on the unit sphere (normalised Gaussians).
DirectionMatrix gen_spherical(int d, int ell, RngStream& rng);
/// i.i.d. entries uniform on {-1, +1}.
DirectionMatrix gen_rademacher(int d, int ell, RngStream& rng);
/// ell distinct standard basis vectors in uniformly random order.
DirectionMatrix gen_coordinate(int d, int ell, RngStream& rng);
/// Haar-distributed point of the Stiefel manifold: thin QR of a Gaussian
/// d x ell matrix with column j of Q multiplied by sign(R_jj), sign(0) = +1.
/// A zero R_jj triggers one resample, then DegenerateSampleError.
DirectionMatrix gen_qr_haar(int d, int ell, RngStream& rng);
/// ell columns sampled without replacement from the padded butterfly matrix.
DirectionMatrix gen_butterfly(int d, int ell, RngStream& rng);
/// First ell columns of I - 2 v v^T, v uniform on the sphere.
DirectionMatrix gen_householder(int d, int ell, RngStream& rng);
/// ell columns of I - 2 v v^T sampled without replacement.
DirectionMatrix gen_perm_householder(int d, int ell, RngStream& rng);
/// A (A^T A)^{-1/2} for Gaussian A, via the eigendecomposition of A^T A.
/// Smallest eigenvalue < 1e-12 * largest triggers one resample, then
/// DegenerateSampleError.
DirectionMatrix gen_stiefel(int d, int ell, RngStream& rng);

/// Householder columns for a given unit vector `v` and column indices.
DirectionMatrix householder_columns(const Eigen::VectorXd& v, std::span<const int> indices,
                                    DirectionKind kind);

DirectionMatrix generate(DirectionKind kind, int d, int ell, RngStream& rng);

/// Per-run generator. For coordinate directions with ell == d the identity
/// is built once and returned on every call (no random draws), since column
/// order does not change the estimator.
class DirectionSampler {
 public:
  DirectionSampler(DirectionKind kind, int d, int ell, bool cache_identity = true);

  DirectionKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return d_; }
  int ell() const noexcept { return ell_; }
  bool uses_cache() const noexcept { return cached_.has_value(); }

  /// Reference is valid until the next call.
  const DirectionMatrix& sample(RngStream& rng);

 private:
  DirectionKind kind_;
  int d_;
  int ell_;
  std::optional<DirectionMatrix> cached_;
  std::optional<DirectionMatrix> last_;
};

/// Debug dump: header line `d,ell,kind,seed`, a line with those values,
/// then one line per column (column-major), values printed with %.17g.
void write_direction_csv(std::ostream& out, const DirectionMatrix& p, std::uint64_t seed);

struct DirectionDump {
  DirectionMatrix matrix;
  std::uint64_t seed;
};

DirectionDump read_direction_csv(std::istream& in);

}  // namespace zofd
