#include "cdops/cd_matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace cdops {

namespace {

void check_same_group(const CDMatrix& a, const CDMatrix& b, const char* what) {
  if (!(a.group()->spec() == b.group()->spec())) {
    throw UsageError(std::string(what) + ": operands live on different groups");
  }
}

}  // namespace

CDMatrix::CDMatrix(std::shared_ptr<const Group> group) : group_(std::move(group)) {
  if (!group_) throw UsageError("CDMatrix needs a group");
}

void CDMatrix::bump_radii(int wl_z, int wl_y) {
  diag_radius_ = std::max(diag_radius_, wl_z);
  col_radius_ = std::max(col_radius_, wl_y);
}

CDMatrix CDMatrix::identity(std::shared_ptr<const Group> group, int col_radius) {
  CDMatrix m(group);
  auto ball = group->ball(col_radius);
  CanonicalKey e = group->key(group->identity());
  DiagonalFn& fn = m.diags_[e];
  for (std::size_t i = 0; i < ball->size(); ++i) {
    fn[{ball->word_length_at(i), ball->at(i)}] = Complex(1.0, 0.0);
  }
  m.bump_radii(0, col_radius);
  return m;
}

CDMatrix CDMatrix::shift(std::shared_ptr<const Group> group, const Coords& z, int col_radius) {
  CDMatrix m(group);
  auto ball = group->ball(col_radius);
  CanonicalKey kz = group->key(z);
  DiagonalFn& fn = m.diags_[kz];
  for (std::size_t i = 0; i < ball->size(); ++i) {
    fn[{ball->word_length_at(i), ball->at(i)}] = Complex(1.0, 0.0);
  }
  m.bump_radii(kz.first, col_radius);
  return m;
}

CDMatrix CDMatrix::diagonal_op(std::shared_ptr<const Group> group,
                               const std::vector<std::pair<Coords, Complex>>& m) {
  CDMatrix out(group);
  for (const auto& [y, v] : m) out.set_entry(group->identity(), y, v);
  return out;
}

std::size_t CDMatrix::entry_count() const {
  std::size_t n = 0;
  for (const auto& [z, fn] : diags_) n += fn.size();
  return n;
}

void CDMatrix::set_entry(const Coords& z, const Coords& y, Complex v) {
  CanonicalKey kz = group_->key(z);
  CanonicalKey ky = group_->key(y);
  if (v == Complex(0.0, 0.0)) {
    auto it = diags_.find(kz);
    if (it != diags_.end()) {
      it->second.erase(ky);
      if (it->second.empty()) diags_.erase(it);
    }
    return;
  }
  diags_[kz][ky] = v;
  bump_radii(kz.first, ky.first);
}

void CDMatrix::add_entry(const Coords& z, const Coords& y, Complex v) {
  CanonicalKey kz = group_->key(z);
  CanonicalKey ky = group_->key(y);
  Complex next = v;
  auto it = diags_.find(kz);
  if (it != diags_.end()) {
    auto jt = it->second.find(ky);
    if (jt != it->second.end()) next += jt->second;
  }
  set_entry(z, y, next);
}

Complex CDMatrix::diag_value(const Coords& z, const Coords& y) const {
  auto wz = group_->word_length_within(z);
  auto wy = group_->word_length_within(y);
  if (!wz || !wy) return {0.0, 0.0};
  auto it = diags_.find({*wz, z});
  if (it == diags_.end()) return {0.0, 0.0};
  auto jt = it->second.find({*wy, y});
  return jt == it->second.end() ? Complex(0.0, 0.0) : jt->second;
}

Complex CDMatrix::entry(const Coords& x, const Coords& y) const {
  return diag_value(group_->mul(x, group_->inv(y)), y);
}

CDMatrix add(const CDMatrix& a, const CDMatrix& b) {
  check_same_group(a, b, "add");
  CDMatrix out = a;
  for (const auto& [kz, fn] : b.diags_) {
    DiagonalFn& dst = out.diags_[kz];
    for (const auto& [ky, v] : fn) {
      Complex next = v;
      auto it = dst.find(ky);
      if (it != dst.end()) next += it->second;
      if (next == Complex(0.0, 0.0)) {
        dst.erase(ky);
      } else {
        dst[ky] = next;
        out.bump_radii(kz.first, ky.first);
      }
    }
    if (dst.empty()) out.diags_.erase(kz);
  }
  out.cert_ = CertifiedRegion::join(a.cert_, b.cert_);
  return out;
}

CDMatrix scale(Complex alpha, const CDMatrix& a) {
  CDMatrix out(a.group());
  if (alpha == Complex(0.0, 0.0)) return out;
  out = a;
  for (auto& [kz, fn] : out.diags_) {
    for (auto& [ky, v] : fn) v *= alpha;
  }
  return out;
}

CDMatrix compose(const CDMatrix& h, const CDMatrix& f) {
  check_same_group(h, f, "compose");
  const Group& g = *h.group();
  CDMatrix out(h.group());
  // l_v(y) = sum over factor diagonals r, w with r w = v of n_r(w y) m_w(y).
  // Outer loops run in canonical order, so each output value accumulates in a
  // fixed order.
  for (const auto& [kr, nr] : h.diags_) {
    for (const auto& [kw, mw] : f.diags_) {
      Coords v = g.mul(kr.second, kw.second);
      auto wlv = g.word_length_within(v);
      if (!wlv) {
        throw TruncationError("compose: product diagonal " + format_element(v) +
                              " leaves B_" + std::to_string(g.max_radius()) + " on " +
                              g.spec().name());
      }
      CanonicalKey kv{*wlv, std::move(v)};
      DiagonalFn* dst = nullptr;
      for (const auto& [ky, mval] : mw) {
        Coords wy = g.mul(kw.second, ky.second);
        auto wl_wy = g.word_length_within(wy);
        if (!wl_wy) continue;  // outside every support
        auto it = nr.find({*wl_wy, wy});
        if (it == nr.end()) continue;
        if (!dst) dst = &out.diags_[kv];
        Complex& slot = (*dst)[ky];
        slot += it->second * mval;
        out.bump_radii(kv.first, ky.first);
      }
      if (dst) {
        // Exact cancellations are kept out of the support.
        for (auto it = dst->begin(); it != dst->end();) {
          it = it->second == Complex(0.0, 0.0) ? dst->erase(it) : std::next(it);
        }
        if (dst->empty()) out.diags_.erase(kv);
      }
    }
  }
  out.cert_.row_margin = h.cert_.row_margin + h.diag_radius_;
  out.cert_.col_margin = f.cert_.col_margin + f.diag_radius_;
  return out;
}

CDMatrix adjoint(const CDMatrix& f) {
  const Group& g = *f.group();
  CDMatrix out(f.group());
  // (D^{m_v}_v)^* = D^{T_v conj(m_v)}_{v^-1}: support at y' = v y.
  for (const auto& [kv, mv] : f.diags_) {
    Coords vinv = g.inv(kv.second);
    DiagonalFn& dst = out.diags_[{kv.first, vinv}];
    for (const auto& [ky, val] : mv) {
      Coords y2 = g.mul(kv.second, ky.second);
      auto wl = g.word_length_within(y2);
      if (!wl) {
        throw TruncationError("adjoint: column support leaves B_" +
                              std::to_string(g.max_radius()));
      }
      dst[{*wl, std::move(y2)}] = std::conj(val);
      out.bump_radii(kv.first, *wl);
    }
  }
  out.cert_.row_margin = f.cert_.col_margin;
  out.cert_.col_margin = f.cert_.row_margin;
  return out;
}

CDMatrix star_power(const CDMatrix& f, int k) {
  if (k < 0) throw UsageError("star_power needs k >= 0");
  if (k == 0) return CDMatrix::identity(f.group(), f.col_radius());
  CDMatrix acc = f;
  // Repeated squaring over the bits of k, most significant first.
  const int top = std::bit_width(static_cast<unsigned>(k)) - 1;
  for (int bit = top - 1; bit >= 0; --bit) {
    acc = compose(acc, acc);
    if ((k >> bit) & 1) acc = compose(acc, f);
  }
  return acc;
}

double cd_norm(const CDMatrix& f) {
  double s = 0;
  for (const auto& [kz, fn] : f.diagonals()) {
    double sup = 0;
    for (const auto& [ky, v] : fn) sup = std::max(sup, std::abs(v));
    s += sup;
  }
  return s;
}

double cd_norm_w(const CDMatrix& f, const Weight& w) {
  const Group& g = *f.group();
  double s = 0;
  for (const auto& [kz, fn] : f.diagonals()) {
    double sup = 0;
    for (const auto& [ky, v] : fn) sup = std::max(sup, std::abs(v));
    s += sup * (w.length_dependent() ? w.eval_length(kz.first) : w.eval(g, kz.second));
  }
  return s;
}

Envelope envelope_of(const CDMatrix& f) {
  Envelope a(f.group());
  for (const auto& [kz, fn] : f.diagonals()) {
    double sup = 0;
    for (const auto& [ky, v] : fn) sup = std::max(sup, std::abs(v));
    if (sup > 0) a.set(kz.second, sup);
  }
  return a;
}

DenseSection to_dense(const CDMatrix& f, const std::shared_ptr<const Ball>& ball) {
  DenseSection m;
  m.group = f.group();
  m.ball = ball;
  const auto n = static_cast<Eigen::Index>(ball->size());
  m.entries = Eigen::MatrixXcd::Zero(n, n);
  const Group& g = *f.group();
  for (const auto& [kz, fn] : f.diagonals()) {
    for (const auto& [ky, v] : fn) {
      auto yi = ball->index_of(ky.second);
      if (!yi) continue;
      auto xi = ball->index_of(g.mul(kz.second, ky.second));
      if (!xi) continue;
      m.entries(static_cast<Eigen::Index>(*xi), static_cast<Eigen::Index>(*yi)) = v;
    }
  }
  return m;
}

CDMatrix from_dense(const DenseSection& m) {
  if (!m.group || !m.ball) throw UsageError("from_dense: empty section");
  CDMatrix out(m.group);
  const Group& g = *m.group;
  const auto& ball = *m.ball;
  for (std::size_t xi = 0; xi < ball.size(); ++xi) {
    for (std::size_t yi = 0; yi < ball.size(); ++yi) {
      const Complex v = m.entries(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(yi));
      if (v == Complex(0.0, 0.0)) continue;
      Coords z = g.mul(ball.at(xi), g.inv(ball.at(yi)));
      out.set_entry(z, ball.at(yi), v);
    }
  }
  return out;
}

double max_certified_diff(const DenseSection& a, const DenseSection& b,
                          const CertifiedRegion& region) {
  if (a.ball != b.ball && a.ball->size() != b.ball->size()) {
    throw UsageError("max_certified_diff: sections on different balls");
  }
  const auto& ball = *a.ball;
  const int r = ball.radius();
  double worst = 0;
  for (std::size_t xi = 0; xi < ball.size(); ++xi) {
    const int wx = ball.word_length_at(xi);
    for (std::size_t yi = 0; yi < ball.size(); ++yi) {
      if (!region.certifies(wx, ball.word_length_at(yi), r)) continue;
      worst = std::max(worst,
                       std::abs(a.entries(static_cast<Eigen::Index>(xi),
                                          static_cast<Eigen::Index>(yi)) -
                                b.entries(static_cast<Eigen::Index>(xi),
                                          static_cast<Eigen::Index>(yi))));
    }
  }
  return worst;
}

VectorSection make_vector_section(std::shared_ptr<const Group> group,
                                  std::shared_ptr<const Ball> ball) {
  VectorSection c;
  c.group = std::move(group);
  c.ball = std::move(ball);
  c.values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(c.ball->size()));
  return c;
}

double VectorSection::norm_l1() const { return values.cwiseAbs().sum(); }
double VectorSection::norm_l2() const { return values.norm(); }
double VectorSection::norm_linf() const {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

VectorSection apply(const CDMatrix& f, const VectorSection& c) {
  if (!(f.group()->spec() == c.group->spec())) {
    throw UsageError("apply: operator and vector live on different groups");
  }
  const Group& g = *f.group();
  const auto& ball = *c.ball;
  VectorSection out = make_vector_section(c.group, c.ball);
  std::vector<char> certified(ball.size(), 1);
  for (const auto& [kz, fn] : f.diagonals()) {
    for (const auto& [ky, v] : fn) {
      auto yi = ball.index_of(ky.second);
      Coords x = g.mul(kz.second, ky.second);
      auto xi = ball.index_of(x);
      if (yi) {
        if (xi) {
          out.values(static_cast<Eigen::Index>(*xi)) +=
              v * c.values(static_cast<Eigen::Index>(*yi));
          if (!c.row_certified(*yi)) certified[*xi] = 0;
        }
      } else if (xi) {
        // The true sum for this row references c outside the section.
        certified[*xi] = 0;
      }
    }
  }
  out.certified_rows = std::move(certified);
  return out;
}

Envelope abs_envelope(const VectorSection& c) {
  Envelope e(c.group);
  const auto& ball = *c.ball;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const double v = std::abs(c.values(static_cast<Eigen::Index>(i)));
    if (v > 0) e.set(ball.at(i), v);
  }
  return e;
}

}  // namespace cdops
