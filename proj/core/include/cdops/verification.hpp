#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cdops/cd_matrix.hpp"
#include "cdops/representations.hpp"
#include "cdops/rng.hpp"

namespace cdops {

/// Random operator with diagonals on B_{diag_radius} and columns on
/// B_{col_radius}; entries have random moduli in [0, 1) and random phases,
/// all drawn from the counter generator (order independent).
CDMatrix random_cd_matrix(std::shared_ptr<const Group> group, int diag_radius,
                          int col_radius, const CounterRng& rng, std::uint64_t tag);

/// Random vector on the ball with entries of modulus < 1.
VectorSection random_vector_section(std::shared_ptr<const Group> group,
                                    const std::shared_ptr<const Ball>& ball,
                                    const CounterRng& rng, std::uint64_t tag);

/// Random bivector supported on B_support x B_support inside the ball.
BiVectorSection random_interior_bivector(std::shared_ptr<const Group> group,
                                         const std::shared_ptr<const Ball>& ball,
                                         int support_radius, const CounterRng& rng,
                                         std::uint64_t tag);

/// Independent recomputation of the CD norm from a dense section: per-diagonal
/// maxima of |entries| summed in canonical diagonal order. The section must
/// contain every entry of the operator (ball radius >= diag + column radius).
double cd_norm_from_dense(const DenseSection& m);

struct PropertyCheck {
  std::string name;
  bool pass = true;
  double worst = 0;   // worst observed deviation (semantics per check)
  double bound = 0;   // allowed bound
  std::size_t cases = 0;
  std::string note;
};

struct VerifySummary {
  std::vector<PropertyCheck> checks;
  bool all_pass = true;
};

/// The randomized property suites behind `verify`: isometry of the
/// side-diagonal norm, composition against dense matrix products, involution
/// against the conjugate transpose, convolution domination, the intertwining
/// identity, CD-norm submultiplicativity and the operator-norm bound.
/// Rejects out-of-hypothesis groups unless their override flag is set.
VerifySummary run_property_suites(std::shared_ptr<const Group> group, int instances,
                                  std::uint64_t seed);

}  // namespace cdops
