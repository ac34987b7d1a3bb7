#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cdops/envelope.hpp"
#include "cdops/group.hpp"

namespace cdops {

enum class WeightKind {
  Constant,
  PolynomialLength,     // (1 + len)^s
  SubexponentialLength, // exp(c * len^beta), 0 < beta < 1
  ExponentialLength,    // exp(c * len)
  ProductZ2,            // (1 + |k1|)^s on Z^2; U = {-1,0,1} x Z is infinite
};

/// An evaluable weight omega: G -> [1, inf) with omega(e) = 1,
/// omega(g^-1) = omega(g) and omega(gh) <= omega(g) omega(h).
/// All shipped families except ProductZ2 depend on the word length only.
class Weight {
 public:
  static Weight constant();
  static Weight polynomial_length(double s);
  static Weight subexponential_length(double c, double beta);
  static Weight exponential_length(double c);
  static Weight product_z2(double s);

  /// Parses "const", "poly:s=2", "subexp:c=0.5,beta=0.5", "exp:c=0.7",
  /// "prodz2:s=2".
  static Weight parse(std::string_view spec);
  std::string spec_string() const;

  WeightKind kind() const { return kind_; }
  bool length_dependent() const { return kind_ != WeightKind::ProductZ2; }

  double eval(const Group& group, const Coords& g) const;

  /// The length profile phi with omega = phi(word length); nondecreasing for
  /// every shipped family. UsageError for ProductZ2.
  double eval_length(int len) const;

  /// sup of omega over U^n for the weight's own generating set: the length
  /// profile for length weights, (1+n)^s for ProductZ2 (whose U is the
  /// infinite set {-1,0,1} x Z, handled in closed form).
  double sup_on_ball(int n) const;

 private:
  Weight(WeightKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  WeightKind kind_ = WeightKind::Constant;
  double a_ = 0;  // s or c
  double b_ = 0;  // beta
};

double l1w_norm(const Envelope& a, const Weight& w);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

/// Shared decision rule for the GRS/UGRS sequences: pass when the last
/// quarter is nonincreasing and the final value is below 1.05; fail when the
/// whole last quarter sits at or above 1.10; inconclusive otherwise. A finite
/// diagnostic is necessarily heuristic; the thresholds are documented, not
/// claimed as proof.
Verdict limit_one_verdict(const std::vector<double>& seq);

struct GrsReport {
  Coords base;
  std::vector<double> seq;  // omega(x^n)^{1/n}, n = 1..N
  Verdict verdict = Verdict::Inconclusive;
};

/// Gelfand-Raikov-Shilov diagnostic along powers of a single element.
/// Requires N >= 10 and, for length weights, x^n inside the radius budget.
GrsReport grs_diagnostic(const Weight& w, const Group& group, const Coords& x, int N);

struct UgrsReport {
  std::vector<double> seq;  // sup_{U^n} omega^{1/n}, n = 1..N
  Verdict verdict = Verdict::Inconclusive;
  bool closed_form = false;  // ProductZ2 route
};

/// Uniform GRS diagnostic over balls. Length weights use the length profile
/// (the sphere supremum of the shipped families; verified by enumeration in
/// the tests); ProductZ2 uses its closed form.
UgrsReport ugrs_diagnostic(const Weight& w, const Group& group, int N);

struct SphereRatioReport {
  std::vector<double> ratios;      // per n = 1..N; skipped spheres carry 1
  std::vector<int> skipped;        // radii with empty spheres
  double max_ratio = 1.0;
  bool within(double C) const { return max_ratio <= C; }
};

/// Per-sphere sup/inf ratios of omega over U^n \ U^{n-1} (the quantity bounded
/// by the constant C in the weighted inversion hypothesis; C is reported, not
/// chosen). Enumerates spheres for finite U; ProductZ2 is closed-form with its
/// own infinite U, giving ratio 1.
SphereRatioReport ratio_condition(const Weight& w, const Group& group, int N);

/// The weight v(n) = sup_{U^{|n|}} omega induced on Z; symmetric and
/// nondecreasing in |n|, v(0) = 1.
struct InducedWeightZ {
  std::vector<double> v;  // v[k] for |n| = k, k = 0..N
  double at(std::int64_t n) const;
  int limit() const { return static_cast<int>(v.size()) - 1; }
};

InducedWeightZ induced_weight_v(const Weight& w, const Group& group, int N);

}  // namespace cdops
