#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <memory>
#include <vector>

#include "cdops/envelope.hpp"
#include "cdops/group.hpp"
#include "cdops/weight.hpp"

namespace cdops {

using Complex = std::complex<double>;

/// Where a truncated evaluation is guaranteed exact. A pair (x, y) on the
/// ball B_n is certified when wl(x) + row_margin <= n or wl(y) + col_margin
/// <= n: every index a composed evaluation can reference from a certified
/// pair stays inside the ball. Fresh matrices carry margins (0, 0); margins
/// accumulate under composition, so the region only shrinks.
struct CertifiedRegion {
  int row_margin = 0;
  int col_margin = 0;

  bool certifies(int wl_x, int wl_y, int ball_radius) const {
    return wl_x + row_margin <= ball_radius || wl_y + col_margin <= ball_radius;
  }
  bool certifies_row(int wl_x, int ball_radius) const {
    return wl_x + row_margin <= ball_radius;
  }
  static CertifiedRegion join(const CertifiedRegion& a, const CertifiedRegion& b) {
    return {std::max(a.row_margin, b.row_margin), std::max(a.col_margin, b.col_margin)};
  }
};

/// A side-diagonal function m_z: column index y -> entry value, finitely
/// supported, in canonical order.
using DiagonalFn = std::map<CanonicalKey, Complex>;

/// A convolution-dominated operator stored by side-diagonals: the element
/// f = sum_z m_z delta_z of the twisted algebra l^1(G, l^inf(G), T),
/// identified with the operator whose matrix is A(x, y) = m_{x y^-1}(y).
///
/// Values are exact finitely supported data; every algebra operation below is
/// computed exactly over the supports (truncation never happens silently, it
/// raises TruncationError when a support would leave the radius budget).
class CDMatrix {
 public:
  explicit CDMatrix(std::shared_ptr<const Group> group);

  /// The identity operator materialized on columns B_N: single diagonal
  /// m_e = 1 on B_N.
  static CDMatrix identity(std::shared_ptr<const Group> group, int col_radius);

  /// The shift lambda(z) materialized on columns B_N: m_z = 1 on B_N.
  static CDMatrix shift(std::shared_ptr<const Group> group, const Coords& z, int col_radius);

  /// Multiplication operator D^m (diagonal at the identity).
  static CDMatrix diagonal_op(std::shared_ptr<const Group> group,
                              const std::vector<std::pair<Coords, Complex>>& m);

  const std::shared_ptr<const Group>& group() const { return group_; }
  const std::map<CanonicalKey, DiagonalFn>& diagonals() const { return diags_; }

  int diag_radius() const { return diag_radius_; }  // K: max wl(z) with m_z != 0
  int col_radius() const { return col_radius_; }    // N: max wl(y) over supports
  const CertifiedRegion& certified() const { return cert_; }
  bool empty() const { return diags_.empty(); }
  std::size_t entry_count() const;

  /// Sets m_z(y) = v (v == 0 erases). Throws OutOfRadiusError when z or y is
  /// beyond the radius budget.
  void set_entry(const Coords& z, const Coords& y, Complex v);
  void add_entry(const Coords& z, const Coords& y, Complex v);

  Complex diag_value(const Coords& z, const Coords& y) const;
  /// Dense entry law A(x, y) = m_{x y^-1}(y).
  Complex entry(const Coords& x, const Coords& y) const;

 private:
  friend CDMatrix compose(const CDMatrix&, const CDMatrix&);
  friend CDMatrix adjoint(const CDMatrix&);
  friend CDMatrix add(const CDMatrix&, const CDMatrix&);
  friend CDMatrix scale(Complex, const CDMatrix&);

  void bump_radii(int wl_z, int wl_y);

  std::shared_ptr<const Group> group_;
  std::map<CanonicalKey, DiagonalFn> diags_;
  int diag_radius_ = 0;
  int col_radius_ = 0;
  CertifiedRegion cert_;
};

CDMatrix add(const CDMatrix& a, const CDMatrix& b);
CDMatrix scale(Complex alpha, const CDMatrix& a);

/// Twisted convolution h * f realized on side-diagonals,
///   l_v = sum_{r w = v} (T_{w^-1} n_r) m_w,  (T_{w^-1} n_r)(y) = n_r(w y),
/// which matches operator composition R(h) R(f). Exact over the finite
/// supports; throws TruncationError if a product diagonal leaves the budget.
CDMatrix compose(const CDMatrix& h, const CDMatrix& f);

/// Algebra involution: the diagonal at v contributes T_v conj(m_v) at v^-1,
/// so the dense matrix is the conjugate transpose.
CDMatrix adjoint(const CDMatrix& f);

/// k-th twisted-convolution power by repeated squaring; k = 0 gives the
/// identity on columns B_{col_radius}.
CDMatrix star_power(const CDMatrix& f, int k);

/// CD norm: sum_z sup_y |m_z(y)|, accumulated in canonical diagonal order.
double cd_norm(const CDMatrix& f);
/// Weighted CD norm: sum_z sup_y |m_z(y)| omega(z).
double cd_norm_w(const CDMatrix& f, const Weight& w);

/// The dominating sequence a(z) = sup_y |m_z(y)|.
Envelope envelope_of(const CDMatrix& f);

/// A finite section of the operator on a ball (row x, column y).
struct DenseSection {
  std::shared_ptr<const Group> group;
  std::shared_ptr<const Ball> ball;
  Eigen::MatrixXcd entries;
  bool hermitian_flag = false;

  std::size_t size() const { return ball ? ball->size() : 0; }
};

DenseSection to_dense(const CDMatrix& f, const std::shared_ptr<const Ball>& ball);

/// Side-diagonal decomposition of a dense section: m_z(y) = M(z y, y).
/// Inverse of to_dense on the section. Needs max radius >= 2 * ball radius
/// for the diagonal indices.
CDMatrix from_dense(const DenseSection& m);

/// Max |a - b| over entries certified by `region` on the common ball.
double max_certified_diff(const DenseSection& a, const DenseSection& b,
                          const CertifiedRegion& region);

/// A vector known on a ball, with per-row certification for results of
/// truncated evaluations (empty mask = all rows certified).
struct VectorSection {
  std::shared_ptr<const Group> group;
  std::shared_ptr<const Ball> ball;
  Eigen::VectorXcd values;
  std::vector<char> certified_rows;

  bool row_certified(std::size_t i) const {
    return certified_rows.empty() || certified_rows[i] != 0;
  }
  double norm_l1() const;
  double norm_l2() const;
  double norm_linf() const;
};

VectorSection make_vector_section(std::shared_ptr<const Group> group,
                                  std::shared_ptr<const Ball> ball);

/// (A c)(x) = sum_y A(x, y) c(y), exact over the section; a row is certified
/// when every column its diagonal data can reach lies inside the ball.
VectorSection apply(const CDMatrix& f, const VectorSection& c);

/// |c| as an envelope on the section's ball.
Envelope abs_envelope(const VectorSection& c);

}  // namespace cdops
