#include <cmath>

#include "cdops/cd_matrix.hpp"
#include "cdops/verification.hpp"
#include "doctest.h"

using namespace cdops;

namespace {

std::shared_ptr<const Group> make_group(const char* name, int max_radius) {
  auto spec = GroupSpec::parse(name);
  spec.max_radius = max_radius;
  return Group::make(spec);
}

}  // namespace

TEST_CASE("identity, add, scale") {
  auto g = make_group("Z2", 24);
  CDMatrix id = CDMatrix::identity(g, 4);
  CHECK(cd_norm(id) == 1.0);

  const CounterRng rng(3);
  CDMatrix a = random_cd_matrix(g, 2, 4, rng, 0);
  CDMatrix zero = add(a, scale(Complex(-1, 0), a));
  CHECK(zero.empty());
  CHECK(cd_norm(zero) == 0.0);

  const Complex alpha(0.3, -0.4);
  CHECK(cd_norm(scale(alpha, a)) == doctest::Approx(std::abs(alpha) * cd_norm(a)).epsilon(1e-14));
}

TEST_CASE("to_dense realizes the entry law") {
  auto g = make_group("Z1", 32);
  auto ball = g->ball(4);

  CDMatrix id = CDMatrix::identity(g, 4);
  DenseSection di = to_dense(id, ball);
  CHECK(di.entries.isApprox(Eigen::MatrixXcd::Identity(9, 9)));

  CDMatrix lam = CDMatrix::shift(g, {1}, 4);
  DenseSection dl = to_dense(lam, ball);
  for (std::size_t xi = 0; xi < ball->size(); ++xi) {
    for (std::size_t yi = 0; yi < ball->size(); ++yi) {
      const double expect = ball->at(xi)[0] - ball->at(yi)[0] == 1 ? 1.0 : 0.0;
      CHECK(dl.entries(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(yi)).real() ==
            expect);
    }
  }

  auto h3 = make_group("H3", 10);
  CDMatrix single(h3);
  single.set_entry({1, 0, 0}, h3->identity(), Complex(1, 0));
  auto hball = h3->ball(2);
  DenseSection ds = to_dense(single, hball);
  CHECK(ds.entries.cwiseAbs().sum() == 1.0);
  auto row = hball->index_of({1, 0, 0});
  auto col = hball->index_of(h3->identity());
  CHECK(ds.entries(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(*col)) ==
        Complex(1, 0));
}

TEST_CASE("from_dense inverts to_dense") {
  auto g = make_group("H3", 10);
  auto ball = g->ball(3);
  const CounterRng rng(11);
  // random dense section
  DenseSection m;
  m.group = g;
  m.ball = ball;
  const auto n = static_cast<Eigen::Index>(ball->size());
  m.entries = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m.entries(i, j) = rng.unit(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) *
                        rng.phase(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 7);
    }
  }
  CDMatrix a = from_dense(m);
  DenseSection back = to_dense(a, ball);
  CHECK((back.entries - m.entries).cwiseAbs().maxCoeff() == 0.0);

  CDMatrix id = from_dense([&] {
    DenseSection s;
    s.group = g;
    s.ball = ball;
    s.entries = Eigen::MatrixXcd::Identity(n, n);
    return s;
  }());
  CHECK(id.diagonals().size() == 1);
  CHECK(id.diagonals().begin()->first.second == g->identity());

  // cd_norm of the decomposition equals the dense per-diagonal recomputation
  CHECK(cd_norm(a) == doctest::Approx(cd_norm_from_dense(m)).epsilon(1e-15));
}

TEST_CASE("envelope_of extracts per-diagonal sups") {
  auto g = make_group("Z2", 24);
  CDMatrix lam = CDMatrix::shift(g, {1, 0}, 3);
  Envelope e = envelope_of(lam);
  CHECK(e.support_size() == 1);
  CHECK(e.at({1, 0}) == 1.0);

  CDMatrix d = CDMatrix::diagonal_op(g, {{{0, 0}, Complex(0.5, 0)}, {{1, 0}, Complex(-2, 0)}});
  Envelope ed = envelope_of(d);
  CHECK(ed.support_size() == 1);
  CHECK(ed.at({0, 0}) == 2.0);
  CHECK(l1w_norm(ed, Weight::constant()) == doctest::Approx(cd_norm(d)));
}

TEST_CASE("apply: identity, shift, certification") {
  auto g = make_group("Z1", 32);
  auto ball = g->ball(6);
  const CounterRng rng(5);
  VectorSection c = random_vector_section(g, ball, rng, 1);

  CDMatrix id = CDMatrix::identity(g, 6);
  VectorSection ic = apply(id, c);
  CHECK((ic.values - c.values).cwiseAbs().maxCoeff() == 0.0);

  CDMatrix lam = CDMatrix::shift(g, {1}, 6);
  VectorSection sc = apply(lam, c);
  for (std::size_t i = 0; i < ball->size(); ++i) {
    if (!sc.row_certified(i)) continue;
    const std::int64_t x = ball->at(i)[0];
    auto prev = ball->index_of({x - 1});
    REQUIRE(prev.has_value());
    CHECK(sc.values(static_cast<Eigen::Index>(i)) ==
          c.values(static_cast<Eigen::Index>(*prev)));
  }
  // row x = -6 reads c(-7) outside the ball: uncertified
  auto edge = ball->index_of({-6});
  CHECK_FALSE(sc.row_certified(*edge));
  auto mid = ball->index_of({0});
  CHECK(sc.row_certified(*mid));
}

TEST_CASE("apply is dominated by the envelope convolution") {
  for (const char* name : {"Z1", "Z2", "H3"}) {
    auto g = make_group(name, 16);
    auto ball = g->ball(4);
    const CounterRng rng(17);
    for (int i = 0; i < 5; ++i) {
      CDMatrix a = random_cd_matrix(g, 2, 4, rng, static_cast<std::uint64_t>(i));
      VectorSection c = random_vector_section(g, ball, rng, static_cast<std::uint64_t>(100 + i));
      VectorSection ac = apply(a, c);
      Envelope bound = convolve(envelope_of(a), abs_envelope(c));
      for (std::size_t r = 0; r < ball->size(); ++r) {
        if (!ac.row_certified(r)) continue;
        CHECK(std::abs(ac.values(static_cast<Eigen::Index>(r))) <=
              bound.at(ball->at(r)) + 1e-12);
      }
    }
  }
}

TEST_CASE("compose: single diagonals follow the twisted law") {
  auto g = make_group("H3", 12);
  // D^n_v o D^m_w = D^{(T_{w^-1} n) m}_{v w}; with n constant the translation
  // acts trivially on the overlap.
  const Coords v{1, 0, 0};
  const Coords w{0, 1, 0};
  CDMatrix dn = CDMatrix::shift(g, v, 4);  // n = 1 on B_4
  CDMatrix dm(g);
  auto ball2 = g->ball(2);
  for (std::size_t i = 0; i < ball2->size(); ++i) {
    dm.set_entry(w, ball2->at(i), Complex(0.25 + static_cast<double>(i) * 0.01, 0.1));
  }
  CDMatrix prod = compose(dn, dm);
  REQUIRE(prod.diagonals().size() == 1);
  CHECK(prod.diagonals().begin()->first.second == g->mul(v, w));
  // values on the product diagonal: n(w y) m(y) = m(y) when w y stays in B_4
  for (const auto& [ky, val] : prod.diagonals().begin()->second) {
    CHECK(val == dm.diag_value(w, ky.second));
  }
  CHECK(prod.diagonals().begin()->second.size() == ball2->size());
}

TEST_CASE("compose with a wide identity is exact") {
  auto g = make_group("Z2", 24);
  const CounterRng rng(23);
  CDMatrix f = random_cd_matrix(g, 2, 4, rng, 9);
  // identity columns must cover w y for every w in B_K, y in B_N
  CDMatrix id = CDMatrix::identity(g, f.diag_radius() + f.col_radius());
  CDMatrix left = compose(id, f);
  REQUIRE(left.diagonals().size() == f.diagonals().size());
  auto it = left.diagonals().begin();
  auto jt = f.diagonals().begin();
  for (; it != left.diagonals().end(); ++it, ++jt) {
    CHECK(it->first == jt->first);
    CHECK(it->second == jt->second);
  }
}

TEST_CASE("toeplitz symbols multiply like polynomials") {
  auto g = make_group("Z1", 128);
  const int N = 24;
  CDMatrix f = add(CDMatrix::shift(g, {0}, N), CDMatrix::shift(g, {1}, N));
  CDMatrix sq = compose(f, f);
  // (1 + x)^2 = 1 + 2x + x^2: interior columns carry the exact coefficients
  const std::vector<double> coeff{1.0, 2.0, 1.0};
  for (int k = 0; k <= 2; ++k) {
    const Complex v = sq.diag_value({k}, {0});
    CHECK(v.real() == doctest::Approx(coeff[static_cast<std::size_t>(k)]));
    CHECK(v.imag() == 0.0);
  }
  CHECK(cd_norm(sq) == doctest::Approx(4.0));

  // dense homomorphism on the certified region
  auto ball = g->ball(N);
  DenseSection dl = to_dense(sq, ball);
  DenseSection df = to_dense(f, ball);
  DenseSection prod = df;
  prod.entries = df.entries * df.entries;
  CHECK(max_certified_diff(dl, prod, sq.certified()) <= 1e-12);
}

TEST_CASE("compose homomorphism against dense products") {
  for (const char* name : {"Z1", "Z2", "H3"}) {
    auto g = make_group(name, 16);
    auto ball = g->ball(5);
    const CounterRng rng(29);
    for (int i = 0; i < 5; ++i) {
      CDMatrix h = random_cd_matrix(g, 2, 5, rng, static_cast<std::uint64_t>(2 * i));
      CDMatrix f = random_cd_matrix(g, 2, 5, rng, static_cast<std::uint64_t>(2 * i + 1));
      CDMatrix hf = compose(h, f);
      DenseSection left = to_dense(hf, ball);
      DenseSection prod = to_dense(h, ball);
      prod.entries = (prod.entries * to_dense(f, ball).entries).eval();
      CHECK(max_certified_diff(left, prod, hf.certified()) <= 1e-10);
      CHECK(cd_norm(hf) <= cd_norm(h) * cd_norm(f) + 1e-10);
    }
  }
}

TEST_CASE("adjoint: dense conjugate transpose and exact involution") {
  auto g = make_group("H3", 12);
  auto ball = g->ball(3);
  const CounterRng rng(31);
  for (int i = 0; i < 5; ++i) {
    CDMatrix f = random_cd_matrix(g, 1, 2, rng, static_cast<std::uint64_t>(i));
    CDMatrix fs = adjoint(f);
    DenseSection left = to_dense(fs, ball);
    DenseSection right = to_dense(f, ball);
    right.entries = right.entries.adjoint().eval();
    CHECK((left.entries - right.entries).cwiseAbs().maxCoeff() <= 1e-12);

    CDMatrix back = adjoint(fs);
    REQUIRE(back.diagonals().size() == f.diagonals().size());
    auto it = back.diagonals().begin();
    auto jt = f.diagonals().begin();
    for (; it != back.diagonals().end(); ++it, ++jt) {
      CHECK(it->first == jt->first);
      CHECK(it->second == jt->second);  // exact, not approximate
    }
  }

  // real diagonal operators are self-adjoint; shifts invert
  CDMatrix d = CDMatrix::diagonal_op(g, {{g->identity(), Complex(2, 0)},
                                         {{1, 0, 0}, Complex(-1, 0)}});
  CDMatrix ds = adjoint(d);
  CHECK(ds.diagonals() == d.diagonals());

  CDMatrix lam = CDMatrix::shift(g, {1, 0, 0}, 2);
  CDMatrix lams = adjoint(lam);
  REQUIRE(lams.diagonals().size() == 1);
  CHECK(lams.diagonals().begin()->first.second == g->inv({1, 0, 0}));
}

TEST_CASE("cd_norm: shifts, weights, disjoint diagonals") {
  auto g = make_group("Z1", 64);
  CDMatrix lam = CDMatrix::shift(g, {3}, 6);
  CHECK(cd_norm(lam) == 1.0);
  Weight w = Weight::polynomial_length(2.0);
  CHECK(cd_norm_w(lam, w) == doctest::Approx(16.0));  // (1+3)^2

  CDMatrix two = add(scale(Complex(0.5, 0), CDMatrix::shift(g, {1}, 6)),
                     scale(Complex(0, 0.25), CDMatrix::shift(g, {-2}, 6)));
  CHECK(cd_norm(two) == doctest::Approx(0.75));
}

TEST_CASE("star powers") {
  auto g = make_group("Z1", 128);
  CDMatrix id = CDMatrix::identity(g, 8);
  CDMatrix id5 = star_power(id, 5);
  CHECK(cd_norm(id5) == 1.0);
  CHECK(id5.diagonals().size() == 1);

  const double t = 0.5;
  CDMatrix f = scale(Complex(t, 0), CDMatrix::shift(g, {1}, 32));
  CDMatrix f8 = star_power(f, 8);
  // (t lambda(1))^8 = t^8 lambda(8) on the interior of the column ball
  REQUIRE(f8.diagonals().size() == 1);
  CHECK(f8.diagonals().begin()->first.second == Coords{8});
  CHECK(std::abs(f8.diag_value({8}, {0}) - std::pow(t, 8)) <= 1e-15);
  CHECK(cd_norm(f8) == doctest::Approx(std::pow(t, 8)).epsilon(1e-12));

  const CounterRng rng(37);
  CDMatrix r = random_cd_matrix(g, 1, 8, rng, 77);
  CHECK(cd_norm(star_power(r, 4)) <= cd_norm(star_power(r, 2)) * cd_norm(star_power(r, 2)) + 1e-12);
}

TEST_CASE("compose beyond the radius budget raises") {
  auto g = make_group("Z1", 8);
  CDMatrix far = CDMatrix::shift(g, {5}, 2);
  CHECK_THROWS_AS(static_cast<void>(compose(far, far)), TruncationError);
}

TEST_CASE("certified region margins accumulate under composition") {
  auto g = make_group("Z1", 64);
  const CounterRng rng(41);
  CDMatrix f = random_cd_matrix(g, 2, 4, rng, 0);
  CHECK(f.certified().row_margin == 0);
  CDMatrix f2 = compose(f, f);
  CHECK(f2.certified().row_margin == 2);
  CHECK(f2.certified().col_margin == 2);
  CDMatrix f3 = compose(f2, f);
  CHECK(f3.certified().row_margin == 2 + f2.diag_radius());
  // add joins pointwise, adjoint swaps
  CHECK(add(f2, f).certified().row_margin == 2);
  CHECK(adjoint(f2).certified().col_margin == f2.certified().row_margin);
}

TEST_CASE("isometry: cd_norm equals the dense recomputation") {
  for (const char* name : {"Z1", "Z2", "H3"}) {
    auto g = make_group(name, 16);
    auto ball = g->ball(6);
    const CounterRng rng(43);
    for (int i = 0; i < 5; ++i) {
      CDMatrix f = random_cd_matrix(g, 2, 4, rng, static_cast<std::uint64_t>(i));
      CHECK(std::abs(cd_norm(f) - cd_norm_from_dense(to_dense(f, ball))) <= 1e-12);
    }
  }
}

TEST_CASE("operator norm is bounded by the CD norm") {
  auto g = make_group("Z2", 16);
  auto ball = g->ball(6);
  const CounterRng rng(47);
  for (int i = 0; i < 3; ++i) {
    CDMatrix f = random_cd_matrix(g, 2, 4, rng, static_cast<std::uint64_t>(i));
    const double op = opnorm_estimate(to_dense(f, ball)).value;
    CHECK(op <= cd_norm(f) + 1e-8);
  }
}
