#include "cdops/verification.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cdops {

CDMatrix random_cd_matrix(std::shared_ptr<const Group> group, int diag_radius,
                          int col_radius, const CounterRng& rng, std::uint64_t tag) {
  auto kball = group->ball(diag_radius);
  auto nball = group->ball(col_radius);
  CDMatrix a(group);
  // Scale so cd_norm stays O(1) regardless of the diagonal count.
  const double amp = 1.0 / static_cast<double>(kball->size());
  for (std::size_t zi = 0; zi < kball->size(); ++zi) {
    const std::uint64_t hz = hash_coords(kball->at(zi));
    for (std::size_t yi = 0; yi < nball->size(); ++yi) {
      const std::uint64_t hy = hash_coords(nball->at(yi));
      const Complex v = amp * rng.unit(tag, hz ^ 0x1, hy) * rng.phase(tag, hz ^ 0x2, hy);
      a.set_entry(kball->at(zi), nball->at(yi), v);
    }
  }
  return a;
}

VectorSection random_vector_section(std::shared_ptr<const Group> group,
                                    const std::shared_ptr<const Ball>& ball,
                                    const CounterRng& rng, std::uint64_t tag) {
  VectorSection c = make_vector_section(group, ball);
  for (std::size_t i = 0; i < ball->size(); ++i) {
    const std::uint64_t h = hash_coords(ball->at(i));
    c.values(static_cast<Eigen::Index>(i)) =
        rng.unit(tag, h, 11) * rng.phase(tag, h, 12);
  }
  return c;
}

BiVectorSection random_interior_bivector(std::shared_ptr<const Group> group,
                                         const std::shared_ptr<const Ball>& ball,
                                         int support_radius, const CounterRng& rng,
                                         std::uint64_t tag) {
  BiVectorSection xi = make_bivector(group, ball);
  const std::size_t m = ball->prefix_size(support_radius);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t hx = hash_coords(ball->at(i));
    for (std::size_t j = 0; j < m; ++j) {
      const std::uint64_t hz = hash_coords(ball->at(j));
      xi.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rng.unit(tag, hx, hz ^ 0x21) * rng.phase(tag, hx, hz ^ 0x22);
    }
  }
  return xi;
}

double cd_norm_from_dense(const DenseSection& m) {
  const Group& g = *m.group;
  const auto& ball = *m.ball;
  std::map<CanonicalKey, double> sup;
  for (std::size_t xi = 0; xi < ball.size(); ++xi) {
    for (std::size_t yi = 0; yi < ball.size(); ++yi) {
      const double v = std::abs(m.entries(static_cast<Eigen::Index>(xi),
                                          static_cast<Eigen::Index>(yi)));
      if (v == 0) continue;
      CanonicalKey key = g.key(g.mul(ball.at(xi), g.inv(ball.at(yi))));
      auto it = sup.find(key);
      if (it == sup.end()) {
        sup.emplace(std::move(key), v);
      } else if (v > it->second) {
        it->second = v;
      }
    }
  }
  double s = 0;
  for (const auto& [key, v] : sup) s += v;
  return s;
}

VerifySummary run_property_suites(std::shared_ptr<const Group> group, int instances,
                                  std::uint64_t seed) {
  if (!group->spec().polynomial_growth() && !group->spec().allow_out_of_hypothesis) {
    throw UsageError("group " + group->spec().name() +
                     " is outside the paper hypotheses; set allow_out_of_hypothesis to "
                     "run the suites anyway");
  }
  const int K = 2;
  const int N = std::min(6, group->max_radius() - K);
  if (N < 2) throw UsageError("verify needs max_radius >= 4");
  const CounterRng rng(seed);

  VerifySummary s;
  auto& checks = s.checks;
  checks.push_back({"isometry", true, 0, 1e-12, 0, "cd_norm vs dense recomputation"});
  checks.push_back({"homomorphism", true, 0, 1e-10, 0, "dense(compose) vs dense product"});
  checks.push_back({"involution", true, 0, 1e-12, 0, "dense(adjoint) vs conjugate transpose"});
  checks.push_back({"involution_exact", true, 0, 0, 0, "adjoint of adjoint is the identity"});
  checks.push_back({"domination", true, 0, 1e-12, 0, "|Ac| <= envelope * |c|"});
  checks.push_back({"intertwining", true, 0, 1e-12, 0, "lambda^D(f) S = S R^omega(f)"});
  checks.push_back({"submultiplicative", true, 0, 1e-10, 0, "cd_norm(h*f) <= cd_norm(h) cd_norm(f)"});
  checks.push_back({"opnorm_bound", true, 0, 1e-8, 0, "opnorm(section) <= cd_norm"});
  PropertyCheck& isometry = checks[0];
  PropertyCheck& homomorphism = checks[1];
  PropertyCheck& involution = checks[2];
  PropertyCheck& involution_exact = checks[3];
  PropertyCheck& domination = checks[4];
  PropertyCheck& intertwining = checks[5];
  PropertyCheck& submult = checks[6];
  PropertyCheck& opbound = checks[7];

  auto full_ball = group->ball(K + N);
  auto col_ball = group->ball(N);

  for (int i = 0; i < instances; ++i) {
    const auto tag = static_cast<std::uint64_t>(i);
    CDMatrix f = random_cd_matrix(group, K, N, rng, tag * 2);
    CDMatrix h = random_cd_matrix(group, K, N, rng, tag * 2 + 1);

    {
      const double lhs = cd_norm(f);
      const double rhs = cd_norm_from_dense(to_dense(f, full_ball));
      isometry.worst = std::max(isometry.worst, std::abs(lhs - rhs));
      ++isometry.cases;
    }
    {
      CDMatrix hf = compose(h, f);
      DenseSection left = to_dense(hf, col_ball);
      DenseSection dh = to_dense(h, col_ball);
      DenseSection df = to_dense(f, col_ball);
      DenseSection prod = dh;
      prod.entries = dh.entries * df.entries;
      homomorphism.worst =
          std::max(homomorphism.worst, max_certified_diff(left, prod, hf.certified()));
      ++homomorphism.cases;

      submult.worst = std::max(submult.worst, cd_norm(hf) - cd_norm(h) * cd_norm(f));
      ++submult.cases;
    }
    {
      CDMatrix fs = adjoint(f);
      DenseSection left = to_dense(fs, full_ball);
      DenseSection right = to_dense(f, full_ball);
      right.entries = right.entries.adjoint().eval();
      involution.worst =
          std::max(involution.worst, (left.entries - right.entries).cwiseAbs().maxCoeff());
      ++involution.cases;

      CDMatrix back = adjoint(fs);
      bool same = back.diagonals().size() == f.diagonals().size();
      if (same) {
        auto it = back.diagonals().begin();
        auto jt = f.diagonals().begin();
        for (; same && it != back.diagonals().end(); ++it, ++jt) {
          same = it->first == jt->first && it->second == jt->second;
        }
      }
      if (!same) involution_exact.pass = false;
      ++involution_exact.cases;
    }
    {
      VectorSection c = random_vector_section(group, col_ball, rng, tag);
      VectorSection ac = apply(f, c);
      Envelope bound = convolve(envelope_of(f), abs_envelope(c));
      for (std::size_t r = 0; r < col_ball->size(); ++r) {
        if (!ac.row_certified(r)) continue;
        const double lhs = std::abs(ac.values(static_cast<Eigen::Index>(r)));
        domination.worst =
            std::max(domination.worst, lhs - bound.at(col_ball->at(r)));
      }
      ++domination.cases;
    }
    {
      const int bi_radius = std::min(group->max_radius(), group->spec().kind == GroupKind::Heisenberg3 ? 4 : 5);
      auto bball = group->ball(bi_radius);
      BiVectorSection xi =
          random_interior_bivector(group, bball, std::max(1, bi_radius / 2), rng, tag);
      IntertwiningReport rep = check_intertwining(f, xi);
      intertwining.worst = std::max(intertwining.worst, rep.max_abs_diff);
      ++intertwining.cases;
    }
    {
      const double norm = cd_norm(f);
      const double op = opnorm_estimate(to_dense(f, full_ball)).value;
      opbound.worst = std::max(opbound.worst, op - norm);
      ++opbound.cases;
    }
  }

  for (auto& c : checks) {
    if (c.worst > c.bound) c.pass = false;
    s.all_pass = s.all_pass && c.pass;
  }
  return s;
}

}  // namespace cdops
