#include "cdops/representations.hpp"

#include <algorithm>
#include <cmath>

#include "cdops/rng.hpp"

namespace cdops {

void BiVectorSection::uncertify(Eigen::Index xi, Eigen::Index zi) {
  if (mask.size() == 0) {
    mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(values.rows(),
                                                                        values.cols(), true);
  }
  mask(xi, zi) = false;
}

void BiVectorSection::set(const Coords& x, const Coords& z, Complex v) {
  auto xi = ball->index_of(x);
  auto zi = ball->index_of(z);
  if (!xi || !zi) throw UsageError("bivector set: index outside the ball");
  values(static_cast<Eigen::Index>(*xi), static_cast<Eigen::Index>(*zi)) = v;
}

Complex BiVectorSection::at(const Coords& x, const Coords& z) const {
  auto xi = ball->index_of(x);
  auto zi = ball->index_of(z);
  if (!xi || !zi) throw UsageError("bivector at: index outside the ball");
  return values(static_cast<Eigen::Index>(*xi), static_cast<Eigen::Index>(*zi));
}

double BiVectorSection::l2_norm_certified() const {
  if (mask.size() == 0) return values.norm();
  double s = 0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (mask(i, j)) s += std::norm(values(i, j));
    }
  }
  return std::sqrt(s);
}

BiVectorSection make_bivector(std::shared_ptr<const Group> group,
                              std::shared_ptr<const Ball> ball) {
  BiVectorSection xi;
  xi.group = std::move(group);
  xi.ball = std::move(ball);
  const auto n = static_cast<Eigen::Index>(xi.ball->size());
  xi.values = Eigen::MatrixXcd::Zero(n, n);
  xi.known_zero_outside = true;
  return xi;
}

BiVectorSection lambda_D_apply(const CDMatrix& f, const BiVectorSection& xi) {
  if (!(f.group()->spec() == xi.group->spec())) {
    throw UsageError("lambda_D_apply: operator and vector live on different groups");
  }
  const Group& g = *f.group();
  const auto& ball = *xi.ball;
  const auto n = static_cast<Eigen::Index>(ball.size());
  BiVectorSection out;
  out.group = xi.group;
  out.ball = xi.ball;
  out.values = Eigen::MatrixXcd::Zero(n, n);
  out.known_zero_outside = false;
  // (lambda^D(f) xi)(x, z) = sum over diagonals w = x y of m_w(y^-1 z) xi(y^-1, z),
  // where y^-1 = w^-1 x.
  for (const auto& [kw, mw] : f.diagonals()) {
    const Coords winv = g.inv(kw.second);
    for (Eigen::Index xidx = 0; xidx < n; ++xidx) {
      const Coords yinv = g.mul(winv, ball.at(static_cast<std::size_t>(xidx)));
      const auto yidx = ball.index_of(yinv);
      if (!yidx && xi.known_zero_outside) continue;
      for (Eigen::Index zidx = 0; zidx < n; ++zidx) {
        Coords arg = g.mul(yinv, ball.at(static_cast<std::size_t>(zidx)));
        auto wl = g.word_length_within(arg);
        if (!wl) continue;
        auto it = mw.find({*wl, std::move(arg)});
        if (it == mw.end() || it->second == Complex(0.0, 0.0)) continue;
        if (!yidx) {
          out.uncertify(xidx, zidx);
          continue;
        }
        const auto yi = static_cast<Eigen::Index>(*yidx);
        out.values(xidx, zidx) += it->second * xi.values(yi, zidx);
        if (!xi.certified_at(yi, zidx)) out.uncertify(xidx, zidx);
      }
    }
  }
  return out;
}

BiVectorSection shear_S(const BiVectorSection& xi) {
  const Group& g = *xi.group;
  const auto& ball = *xi.ball;
  const auto n = static_cast<Eigen::Index>(ball.size());
  BiVectorSection out;
  out.group = xi.group;
  out.ball = xi.ball;
  out.values = Eigen::MatrixXcd::Zero(n, n);
  out.known_zero_outside = xi.known_zero_outside;
  for (Eigen::Index xidx = 0; xidx < n; ++xidx) {
    for (Eigen::Index zidx = 0; zidx < n; ++zidx) {
      const Coords xz = g.mul(ball.at(static_cast<std::size_t>(xidx)),
                              ball.at(static_cast<std::size_t>(zidx)));
      const auto src = ball.index_of(xz);
      if (!src) {
        if (!xi.known_zero_outside) out.uncertify(xidx, zidx);
        continue;
      }
      const auto si = static_cast<Eigen::Index>(*src);
      out.values(xidx, zidx) = xi.values(si, zidx);
      if (!xi.certified_at(si, zidx)) out.uncertify(xidx, zidx);
    }
  }
  return out;
}

BiVectorSection shear_S_inv(const BiVectorSection& xi) {
  const Group& g = *xi.group;
  const auto& ball = *xi.ball;
  const auto n = static_cast<Eigen::Index>(ball.size());
  BiVectorSection out;
  out.group = xi.group;
  out.ball = xi.ball;
  out.values = Eigen::MatrixXcd::Zero(n, n);
  out.known_zero_outside = xi.known_zero_outside;
  for (Eigen::Index xidx = 0; xidx < n; ++xidx) {
    for (Eigen::Index zidx = 0; zidx < n; ++zidx) {
      const Coords xzinv = g.mul(ball.at(static_cast<std::size_t>(xidx)),
                                 g.inv(ball.at(static_cast<std::size_t>(zidx))));
      const auto src = ball.index_of(xzinv);
      if (!src) {
        if (!xi.known_zero_outside) out.uncertify(xidx, zidx);
        continue;
      }
      const auto si = static_cast<Eigen::Index>(*src);
      out.values(xidx, zidx) = xi.values(si, zidx);
      if (!xi.certified_at(si, zidx)) out.uncertify(xidx, zidx);
    }
  }
  return out;
}

BiVectorSection R_omega_apply(const CDMatrix& f, const BiVectorSection& xi) {
  if (!(f.group()->spec() == xi.group->spec())) {
    throw UsageError("R_omega_apply: operator and vector live on different groups");
  }
  const Group& g = *f.group();
  const auto& ball = *xi.ball;
  const auto n = static_cast<Eigen::Index>(ball.size());
  BiVectorSection out;
  out.group = xi.group;
  out.ball = xi.ball;
  out.values = Eigen::MatrixXcd::Zero(n, n);
  out.known_zero_outside = false;
  // (R^omega(f) xi)(x, z) = sum over diagonals w of m_w(w^-1 x) xi(w^-1 x, z).
  for (const auto& [kw, mw] : f.diagonals()) {
    const Coords winv = g.inv(kw.second);
    for (Eigen::Index xidx = 0; xidx < n; ++xidx) {
      Coords y = g.mul(winv, ball.at(static_cast<std::size_t>(xidx)));
      auto wl = g.word_length_within(y);
      if (!wl) continue;
      auto it = mw.find({*wl, y});
      if (it == mw.end() || it->second == Complex(0.0, 0.0)) continue;
      const auto yidx = ball.index_of(y);
      if (!yidx) {
        if (!xi.known_zero_outside) {
          for (Eigen::Index zidx = 0; zidx < n; ++zidx) out.uncertify(xidx, zidx);
        }
        continue;
      }
      const auto yi = static_cast<Eigen::Index>(*yidx);
      for (Eigen::Index zidx = 0; zidx < n; ++zidx) {
        out.values(xidx, zidx) += it->second * xi.values(yi, zidx);
        if (!xi.certified_at(yi, zidx)) out.uncertify(xidx, zidx);
      }
    }
  }
  return out;
}

IntertwiningReport check_intertwining(const CDMatrix& f, const BiVectorSection& xi) {
  const BiVectorSection lhs = lambda_D_apply(f, shear_S(xi));
  const BiVectorSection rhs = shear_S(R_omega_apply(f, xi));
  IntertwiningReport rep;
  const auto n = static_cast<Eigen::Index>(xi.ball->size());
  rep.total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!lhs.certified_at(i, j) || !rhs.certified_at(i, j)) continue;
      ++rep.certified;
      rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(lhs.values(i, j) - rhs.values(i, j)));
    }
  }
  if (rep.certified == 0) {
    throw NumericalError("check_intertwining: certified set is empty");
  }
  return rep;
}

OpNormEstimate opnorm_estimate(const Eigen::MatrixXcd& m, int max_iters, double tol,
                               std::uint64_t seed) {
  const Eigen::Index n = m.cols();
  if (n == 0 || m.rows() == 0) throw UsageError("opnorm_estimate: empty matrix");
  OpNormEstimate est;
  CounterRng rng(seed);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = Complex(rng.symmetric(static_cast<std::uint64_t>(i), 1),
                   rng.symmetric(static_cast<std::uint64_t>(i), 2));
  }
  v.normalize();
  // Iterate on M^* M; precompute it when small enough to pay off.
  const bool pre = n <= 2048;
  Eigen::MatrixXcd b;
  if (pre) b = m.adjoint() * m;
  double lambda_prev = 0;
  for (int it = 1; it <= max_iters; ++it) {
    Eigen::VectorXcd w = pre ? Eigen::VectorXcd(b * v) : Eigen::VectorXcd(m.adjoint() * (m * v));
    const double lambda = std::real(v.dot(w));
    est.iterations = it;
    const double wn = w.norm();
    if (wn == 0) {
      est.value = 0;
      est.converged = true;
      return est;
    }
    v = w / wn;
    if (it > 1 && std::abs(lambda - lambda_prev) <= tol * std::max(1.0, std::abs(lambda))) {
      est.value = std::sqrt(std::max(lambda, 0.0));
      est.converged = true;
      return est;
    }
    lambda_prev = lambda;
  }
  est.value = std::sqrt(std::max(lambda_prev, 0.0));
  est.converged = false;
  return est;
}

OpNormEstimate opnorm_estimate(const DenseSection& m, int max_iters, double tol,
                               std::uint64_t seed) {
  return opnorm_estimate(m.entries, max_iters, tol, seed);
}

SingleDiagCheck single_diag_opnorm_check(const std::vector<std::pair<Coords, Complex>>& m,
                                         const Coords& z,
                                         std::shared_ptr<const Group> group,
                                         const std::shared_ptr<const Ball>& ball) {
  CDMatrix d(group);
  SingleDiagCheck out;
  for (const auto& [y, v] : m) {
    d.set_entry(z, y, v);
    out.sup_norm = std::max(out.sup_norm, std::abs(v));
  }
  if (d.empty()) throw UsageError("single_diag_opnorm_check: zero diagonal");
  out.opnorm = opnorm_estimate(to_dense(d, ball)).value;
  out.diff = std::abs(out.opnorm - out.sup_norm);
  return out;
}

SpectralEstimate specrad_L_estimate(const CDMatrix& f, int k_max) {
  if (k_max < 0) throw UsageError("specrad_L_estimate needs k_max >= 0");
  SpectralEstimate est;
  est.r.push_back(cd_norm(f));
  CDMatrix g = f;
  for (int k = 1; k <= k_max; ++k) {
    try {
      g = compose(g, g);
    } catch (const TruncationError&) {
      est.truncated = true;
      break;
    }
    est.r.push_back(std::pow(cd_norm(g), std::ldexp(1.0, -k)));
    est.k_reached = k;
  }
  est.final_value = est.r.back();
  return est;
}

NormIdReport check_normid(const CDMatrix& f, const std::shared_ptr<const Ball>& ball,
                          int k_max, int opnorm_iters) {
  NormIdReport rep;
  const CDMatrix h = compose(adjoint(f), f);
  rep.spectral = specrad_L_estimate(h, k_max);
  rep.opnorm = opnorm_estimate(to_dense(f, ball), opnorm_iters).value;
  rep.opnorm_squared = rep.opnorm * rep.opnorm;
  rep.ratio = rep.opnorm_squared > 0 ? rep.spectral.final_value / rep.opnorm_squared : 0;
  for (std::size_t i = 1; i < rep.spectral.r.size(); ++i) {
    if (rep.spectral.r[i] > rep.spectral.r[i - 1] + 1e-12) rep.monotone = false;
  }
  rep.spectral.opnorm = rep.opnorm;
  rep.spectral.ratio = rep.ratio;
  return rep;
}

}  // namespace cdops
