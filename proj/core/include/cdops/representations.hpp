#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "cdops/cd_matrix.hpp"

namespace cdops {

/// A vector on G x G known on ball x ball, coordinates (x, z). `mask` marks
/// entries a truncated evaluation could certify (empty mask = all certified);
/// `known_zero_outside` is set for vectors constructed with finite support
/// inside the ball, for which out-of-ball reads are exact zeros rather than
/// unknowns.
struct BiVectorSection {
  std::shared_ptr<const Group> group;
  std::shared_ptr<const Ball> ball;
  Eigen::MatrixXcd values;                             // (x index, z index)
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // empty = all true
  bool known_zero_outside = false;

  bool certified_at(Eigen::Index xi, Eigen::Index zi) const {
    return mask.size() == 0 || mask(xi, zi);
  }
  void uncertify(Eigen::Index xi, Eigen::Index zi);
  void set(const Coords& x, const Coords& z, Complex v);
  Complex at(const Coords& x, const Coords& z) const;
  double l2_norm() const { return values.norm(); }
  double l2_norm_certified() const;
  std::size_t dim() const { return ball ? ball->size() : 0; }
};

/// Zero bivector on ball x ball, flagged as known-zero outside (callers then
/// fill a finite support).
BiVectorSection make_bivector(std::shared_ptr<const Group> group,
                              std::shared_ptr<const Ball> ball);

/// The D-regular representation applied to a section:
///   (lambda^D(f) xi)(x, z) = sum_y f(x y)(y^-1 z) xi(y^-1, z).
/// A pair stays certified only if every nonzero term kept its xi-read inside
/// the ball.
BiVectorSection lambda_D_apply(const CDMatrix& f, const BiVectorSection& xi);

/// The shear S xi(x, z) = xi(x z, z); unitary on l^2(G x G).
BiVectorSection shear_S(const BiVectorSection& xi);
/// S^-1 xi(x, z) = xi(x z^-1, z).
BiVectorSection shear_S_inv(const BiVectorSection& xi);

/// R acting in the first coordinate only:
///   (R^omega(f) xi)(x, z) = sum_y f(y)(y^-1 x) xi(y^-1 x, z);
/// each z-slice equals apply(R(f), xi(., z)).
BiVectorSection R_omega_apply(const CDMatrix& f, const BiVectorSection& xi);

struct IntertwiningReport {
  double max_abs_diff = 0;
  std::size_t certified = 0;
  std::size_t total = 0;
};

/// Verifies lambda^D(f)(S xi) = S(R^omega(f) xi) on the intersection of the
/// certified sets of both sides. Throws NumericalError if the intersection is
/// empty.
IntertwiningReport check_intertwining(const CDMatrix& f, const BiVectorSection& xi);

struct OpNormEstimate {
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value by power iteration on M^* M with a fixed seeded
/// start vector and Rayleigh-quotient stopping (relative change below tol).
OpNormEstimate opnorm_estimate(const Eigen::MatrixXcd& m, int max_iters = 5000,
                               double tol = 1e-10, std::uint64_t seed = 0x5eed);
OpNormEstimate opnorm_estimate(const DenseSection& m, int max_iters = 5000,
                               double tol = 1e-10, std::uint64_t seed = 0x5eed);

struct SingleDiagCheck {
  double opnorm = 0;
  double sup_norm = 0;
  double diff = 0;
};

/// ||D^m_z||_{B(l^2)} = ||m||_inf, checked on a section: power-iteration
/// operator norm of the dense single-diagonal operator against max |m|.
SingleDiagCheck single_diag_opnorm_check(const std::vector<std::pair<Coords, Complex>>& m,
                                         const Coords& z,
                                         std::shared_ptr<const Group> group,
                                         const std::shared_ptr<const Ball>& ball);

/// r_k = cd_norm(f^(2^k))^{1/2^k}; nonincreasing along the 2^k subsequence
/// and an upper bound for the spectral radius at every k.
struct SpectralEstimate {
  std::vector<double> r;
  double final_value = 0;
  double opnorm = 0;  // comparator; 0 until filled
  double ratio = 0;
  int k_reached = 0;
  bool truncated = false;  // squaring stopped at the support budget
};

SpectralEstimate specrad_L_estimate(const CDMatrix& f, int k_max);

struct NormIdReport {
  SpectralEstimate spectral;  // of f* (star) f
  double opnorm = 0;          // of the dense section of f
  double opnorm_squared = 0;
  double ratio = 0;  // spectral.final / opnorm^2
  bool monotone = true;
};

/// Compares the Banach-algebra spectral-radius estimate of f* (star) f with
/// the squared operator norm of a section of f. The exact identity is a limit
/// statement; at finite k this reports monotonicity and the ratio.
NormIdReport check_normid(const CDMatrix& f, const std::shared_ptr<const Ball>& ball,
                          int k_max, int opnorm_iters = 5000);

}  // namespace cdops
