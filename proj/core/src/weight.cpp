#include "cdops/weight.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace cdops {

namespace {

double parse_param(std::string_view body, std::string_view name) {
  // body looks like "s=2" or "c=0.5,beta=0.5"
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t end = body.find(',', pos);
    if (end == std::string_view::npos) end = body.size();
    std::string_view item = body.substr(pos, end - pos);
    std::size_t eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == name) {
      try {
        return std::stod(std::string(item.substr(eq + 1)));
      } catch (const std::exception&) {
        throw UsageError("bad weight parameter '" + std::string(item) + "'");
      }
    }
    pos = end + 1;
  }
  throw UsageError("weight spec is missing parameter '" + std::string(name) + "'");
}

}  // namespace

Weight Weight::constant() { return Weight(WeightKind::Constant, 0, 0); }

Weight Weight::polynomial_length(double s) {
  if (s < 0) throw UsageError("polynomial weight needs s >= 0");
  return Weight(WeightKind::PolynomialLength, s, 0);
}

Weight Weight::subexponential_length(double c, double beta) {
  if (c <= 0 || beta <= 0 || beta >= 1) {
    throw UsageError("subexponential weight needs c > 0 and 0 < beta < 1");
  }
  return Weight(WeightKind::SubexponentialLength, c, beta);
}

Weight Weight::exponential_length(double c) {
  if (c <= 0) throw UsageError("exponential weight needs c > 0");
  return Weight(WeightKind::ExponentialLength, c, 0);
}

Weight Weight::product_z2(double s) {
  if (s < 0) throw UsageError("product weight needs s >= 0");
  return Weight(WeightKind::ProductZ2, s, 0);
}

Weight Weight::parse(std::string_view spec) {
  if (spec == "const") return constant();
  std::size_t colon = spec.find(':');
  std::string_view head = spec.substr(0, colon);
  std::string_view body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "poly") return polynomial_length(parse_param(body, "s"));
  if (head == "subexp") return subexponential_length(parse_param(body, "c"), parse_param(body, "beta"));
  if (head == "exp") return exponential_length(parse_param(body, "c"));
  if (head == "prodz2") return product_z2(parse_param(body, "s"));
  throw UsageError("unknown weight spec '" + std::string(spec) + "'");
}

std::string Weight::spec_string() const {
  std::ostringstream os;
  switch (kind_) {
    case WeightKind::Constant:
      return "const";
    case WeightKind::PolynomialLength:
      os << "poly:s=" << a_;
      break;
    case WeightKind::SubexponentialLength:
      os << "subexp:c=" << a_ << ",beta=" << b_;
      break;
    case WeightKind::ExponentialLength:
      os << "exp:c=" << a_;
      break;
    case WeightKind::ProductZ2:
      os << "prodz2:s=" << a_;
      break;
  }
  return os.str();
}

double Weight::eval_length(int len) const {
  if (len < 0) throw UsageError("negative word length");
  switch (kind_) {
    case WeightKind::Constant:
      return 1.0;
    case WeightKind::PolynomialLength:
      return std::pow(1.0 + len, a_);
    case WeightKind::SubexponentialLength:
      return std::exp(a_ * std::pow(static_cast<double>(len), b_));
    case WeightKind::ExponentialLength:
      return std::exp(a_ * len);
    case WeightKind::ProductZ2:
      throw UsageError("ProductZ2 weight is not a function of word length");
  }
  return 1.0;
}

double Weight::eval(const Group& group, const Coords& g) const {
  if (kind_ == WeightKind::ProductZ2) {
    if (group.spec().kind != GroupKind::IntegerLattice || group.spec().dim != 2) {
      throw UsageError("ProductZ2 weight only lives on Z2");
    }
    group.check_element(g);
    return std::pow(1.0 + std::abs(static_cast<double>(g[0])), a_);
  }
  if (kind_ == WeightKind::Constant) {
    group.check_element(g);
    return 1.0;
  }
  return eval_length(group.word_length(g));
}

double Weight::sup_on_ball(int n) const {
  if (kind_ == WeightKind::ProductZ2) {
    // U^n = {|k1| <= n} x Z, so the supremum is (1+n)^s.
    return std::pow(1.0 + n, a_);
  }
  return eval_length(n);
}

double l1w_norm(const Envelope& a, const Weight& w) {
  const Group& g = *a.group();
  double s = 0;
  for (const auto& [key, v] : a.values()) {
    s += v * (w.length_dependent() ? w.eval_length(key.first) : w.eval(g, key.second));
  }
  return s;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

Verdict limit_one_verdict(const std::vector<double>& seq) {
  if (seq.size() < 4) return Verdict::Inconclusive;
  const std::size_t tail_begin = seq.size() - std::max<std::size_t>(seq.size() / 4, 2);
  bool nonincreasing = true;
  bool all_above = true;
  for (std::size_t i = tail_begin; i < seq.size(); ++i) {
    if (i > tail_begin && seq[i] > seq[i - 1] + 1e-12) nonincreasing = false;
    if (seq[i] < 1.1) all_above = false;
  }
  if (nonincreasing && seq.back() < 1.05) return Verdict::Pass;
  if (all_above) return Verdict::Fail;
  return Verdict::Inconclusive;
}

GrsReport grs_diagnostic(const Weight& w, const Group& group, const Coords& x, int N) {
  if (N < 10) throw UsageError("grs_diagnostic needs N >= 10");
  GrsReport r;
  r.base = x;
  r.seq.reserve(static_cast<std::size_t>(N));
  Coords p = group.identity();
  for (int n = 1; n <= N; ++n) {
    p = group.mul(p, x);
    r.seq.push_back(std::pow(w.eval(group, p), 1.0 / n));
  }
  r.verdict = limit_one_verdict(r.seq);
  return r;
}

UgrsReport ugrs_diagnostic(const Weight& w, const Group& group, int N) {
  if (N < 10) throw UsageError("ugrs_diagnostic needs N >= 10");
  if (!w.length_dependent() &&
      (group.spec().kind != GroupKind::IntegerLattice || group.spec().dim != 2)) {
    throw UsageError("ProductZ2 weight only lives on Z2");
  }
  UgrsReport r;
  r.closed_form = !w.length_dependent();
  r.seq.reserve(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) {
    r.seq.push_back(std::pow(w.sup_on_ball(n), 1.0 / n));
  }
  r.verdict = limit_one_verdict(r.seq);
  return r;
}

SphereRatioReport ratio_condition(const Weight& w, const Group& group, int N) {
  SphereRatioReport r;
  if (N < 1) throw UsageError("ratio_condition needs N >= 1");
  if (!w.length_dependent()) {
    // Spheres of U = {-1,0,1} x Z are {|k1| = n} x Z: omega is constant there.
    r.ratios.assign(static_cast<std::size_t>(N), 1.0);
    r.max_ratio = 1.0;
    return r;
  }
  auto ball = group.ball(N);
  for (int n = 1; n <= N; ++n) {
    const std::size_t lo = ball->prefix_size(n - 1);
    const std::size_t hi = ball->prefix_size(n);
    if (lo == hi) {
      r.skipped.push_back(n);
      r.ratios.push_back(1.0);
      continue;
    }
    double sup = 0, inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = w.eval(group, ball->at(i));
      sup = std::max(sup, v);
      inf = std::min(inf, v);
    }
    r.ratios.push_back(sup / inf);
    r.max_ratio = std::max(r.max_ratio, sup / inf);
  }
  return r;
}

double InducedWeightZ::at(std::int64_t n) const {
  const std::int64_t k = std::llabs(n);
  if (k >= static_cast<std::int64_t>(v.size())) {
    throw OutOfRadiusError("induced weight evaluated beyond its table");
  }
  return v[static_cast<std::size_t>(k)];
}

InducedWeightZ induced_weight_v(const Weight& w, const Group& group, int N) {
  if (N < 0) throw UsageError("induced_weight_v needs N >= 0");
  if (!w.length_dependent() &&
      (group.spec().kind != GroupKind::IntegerLattice || group.spec().dim != 2)) {
    throw UsageError("ProductZ2 weight only lives on Z2");
  }
  InducedWeightZ r;
  r.v.reserve(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) r.v.push_back(w.sup_on_ball(n));
  return r;
}

}  // namespace cdops
