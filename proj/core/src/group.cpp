#include "cdops/group.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdops {

namespace {

bool reduced_word(const Coords& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i] == -w[i + 1]) return false;
  }
  return true;
}

}  // namespace

GroupSpec GroupSpec::parse(std::string_view name) {
  GroupSpec s;
  if (name.size() == 2 && name[0] == 'Z' && name[1] >= '1' && name[1] <= '9') {
    s.kind = GroupKind::IntegerLattice;
    s.dim = name[1] - '0';
    s.max_radius = 12;
    return s;
  }
  if (name == "H3") {
    s.kind = GroupKind::Heisenberg3;
    s.dim = 3;
    s.max_radius = 10;
    return s;
  }
  if (name == "F2") {
    s.kind = GroupKind::FreeGroup2;
    s.dim = 2;
    s.max_radius = 8;
    return s;
  }
  throw UsageError("unknown group spec '" + std::string(name) +
                   "' (expected Z1..Z9, H3, or F2)");
}

std::string GroupSpec::name() const {
  switch (kind) {
    case GroupKind::IntegerLattice:
      return "Z" + std::to_string(dim);
    case GroupKind::Heisenberg3:
      return "H3";
    case GroupKind::FreeGroup2:
      return "F2";
  }
  return "?";
}

int Ball::word_length_at(std::size_t i) const {
  // layer_end_ is nondecreasing; find the first layer whose end exceeds i.
  auto it = std::upper_bound(layer_end_.begin(), layer_end_.end(), i);
  return static_cast<int>(it - layer_end_.begin());
}

std::size_t Ball::prefix_size(int k) const {
  if (k < 0) return 0;
  if (k >= static_cast<int>(layer_end_.size())) return elements_.size();
  return layer_end_[static_cast<std::size_t>(k)];
}

Group::Group(GroupSpec spec) : spec_(spec) {
  if (spec_.kind == GroupKind::IntegerLattice && (spec_.dim < 1 || spec_.dim > 9)) {
    throw UsageError("lattice rank must be in 1..9");
  }
  if (spec_.max_radius < 0) throw UsageError("max radius must be nonnegative");
  switch (spec_.kind) {
    case GroupKind::IntegerLattice:
      for (int i = 0; i < spec_.dim; ++i) {
        Coords e(static_cast<std::size_t>(spec_.dim), 0);
        e[static_cast<std::size_t>(i)] = 1;
        generators_.push_back(e);
        e[static_cast<std::size_t>(i)] = -1;
        generators_.push_back(e);
      }
      break;
    case GroupKind::Heisenberg3:
      generators_ = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
      break;
    case GroupKind::FreeGroup2:
      generators_ = {{1}, {-1}, {2}, {-2}};
      break;
  }
  layers_.push_back({identity()});
  length_of_[identity()] = 0;
  enumerated_ = 1;
}

std::shared_ptr<const Group> Group::make(GroupSpec spec) {
  return std::make_shared<const Group>(spec);
}

std::shared_ptr<const Group> Group::make(std::string_view name) {
  return make(GroupSpec::parse(name));
}

Coords Group::identity() const {
  if (spec_.kind == GroupKind::FreeGroup2) return {};
  return Coords(static_cast<std::size_t>(spec_.kind == GroupKind::Heisenberg3 ? 3 : spec_.dim), 0);
}

bool Group::is_identity(const Coords& g) const { return g == identity(); }

void Group::validate(const Coords& g) const {
  switch (spec_.kind) {
    case GroupKind::IntegerLattice:
      if (g.size() != static_cast<std::size_t>(spec_.dim)) {
        throw UsageError("element arity " + std::to_string(g.size()) +
                         " does not match group " + spec_.name());
      }
      break;
    case GroupKind::Heisenberg3:
      if (g.size() != 3) {
        throw UsageError("H3 element must have 3 coordinates");
      }
      break;
    case GroupKind::FreeGroup2:
      for (std::int64_t a : g) {
        if (a == 0 || a > 2 || a < -2) {
          throw UsageError("F2 letters must be in {-2,-1,1,2}");
        }
      }
      if (!reduced_word(g)) throw UsageError("F2 word is not reduced");
      break;
  }
}

void Group::check_element(const Coords& g) const { validate(g); }

Coords Group::mul(const Coords& g, const Coords& h) const {
  validate(g);
  validate(h);
  switch (spec_.kind) {
    case GroupKind::IntegerLattice: {
      Coords r(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) r[i] = g[i] + h[i];
      return r;
    }
    case GroupKind::Heisenberg3:
      // (a,b,c)*(a',b',c') = (a+a', b+b', c+c'+a*b')
      return {g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]};
    case GroupKind::FreeGroup2: {
      Coords r = g;
      for (std::int64_t a : h) {
        if (!r.empty() && r.back() == -a) {
          r.pop_back();
        } else {
          r.push_back(a);
        }
      }
      return r;
    }
  }
  throw UsageError("unreachable group kind");
}

Coords Group::inv(const Coords& g) const {
  validate(g);
  switch (spec_.kind) {
    case GroupKind::IntegerLattice: {
      Coords r(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) r[i] = -g[i];
      return r;
    }
    case GroupKind::Heisenberg3:
      // (a,b,c)^{-1} = (-a,-b,ab-c)
      return {-g[0], -g[1], g[0] * g[1] - g[2]};
    case GroupKind::FreeGroup2: {
      Coords r(g.rbegin(), g.rend());
      for (auto& a : r) a = -a;
      return r;
    }
  }
  throw UsageError("unreachable group kind");
}

void Group::extend_locked(int target) const {
  while (static_cast<int>(layers_.size()) - 1 < target) {
    const auto& last = layers_.back();
    const int next_len = static_cast<int>(layers_.size());
    std::vector<Coords> next;
    for (const Coords& g : last) {
      for (const Coords& u : generators_) {
        Coords p = mul(g, u);
        if (length_of_.emplace(p, next_len).second) {
          next.push_back(std::move(p));
        }
      }
    }
    std::sort(next.begin(), next.end());
    enumerated_ += next.size();
    if (enumerated_ > spec_.max_ball_elements) {
      std::ostringstream os;
      os << "ball budget of " << spec_.max_ball_elements << " elements exceeded at radius "
         << next_len << " on " << spec_.name() << "; partial sizes:";
      std::size_t total = 0;
      for (std::size_t k = 0; k < layers_.size(); ++k) {
        total += layers_[k].size();
        os << " |B_" << k << "|=" << total;
      }
      // Roll back the failed layer so the cache stays consistent.
      for (const Coords& p : next) length_of_.erase(p);
      enumerated_ -= next.size();
      throw ResourceLimitError(os.str());
    }
    layers_.push_back(std::move(next));
  }
}

int Group::word_length(const Coords& g) const {
  auto r = word_length_within(g);
  if (!r) {
    throw OutOfRadiusError("element " + format_element(g) + " lies outside B_" +
                           std::to_string(spec_.max_radius) + " on " + spec_.name());
  }
  return *r;
}

std::optional<int> Group::word_length_within(const Coords& g, int limit) const {
  validate(g);
  if (limit < 0 || limit > spec_.max_radius) limit = spec_.max_radius;
  if (spec_.kind == GroupKind::FreeGroup2) {
    // Reduced words are geodesic in the free group.
    const int len = static_cast<int>(g.size());
    if (len > limit) return std::nullopt;
    return len;
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto it = length_of_.find(g);
  if (it != length_of_.end()) return it->second <= limit ? std::optional<int>(it->second) : std::nullopt;
  while (static_cast<int>(layers_.size()) - 1 < limit) {
    extend_locked(static_cast<int>(layers_.size()));
    it = length_of_.find(g);
    if (it != length_of_.end()) return it->second;
  }
  return std::nullopt;
}

std::shared_ptr<const Ball> Group::ball(int n) const {
  if (n < 0) throw UsageError("ball radius must be nonnegative");
  if (n > spec_.max_radius) {
    throw UsageError("ball radius " + std::to_string(n) + " exceeds configured max radius " +
                     std::to_string(spec_.max_radius) + " on " + spec_.name());
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto cached = balls_.find(n);
  if (cached != balls_.end()) return cached->second;
  extend_locked(n);
  auto b = std::make_shared<Ball>();
  b->spec_ = spec_;
  b->radius_ = n;
  std::size_t total = 0;
  for (int k = 0; k <= n; ++k) total += layers_[static_cast<std::size_t>(k)].size();
  b->elements_.reserve(total);
  b->layer_end_.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const auto& layer = layers_[static_cast<std::size_t>(k)];
    b->elements_.insert(b->elements_.end(), layer.begin(), layer.end());
    b->layer_end_.push_back(b->elements_.size());
  }
  b->index_.reserve(b->elements_.size());
  for (std::size_t i = 0; i < b->elements_.size(); ++i) b->index_.emplace(b->elements_[i], i);
  auto out = std::shared_ptr<const Ball>(std::move(b));
  balls_.emplace(n, out);
  return out;
}

std::vector<std::pair<int, std::size_t>> Group::ball_sizes(int n) const {
  auto b = ball(n);
  std::vector<std::pair<int, std::size_t>> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) out.emplace_back(k, b->prefix_size(k));
  return out;
}

double growth_fit(const std::vector<std::pair<int, std::size_t>>& sizes) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [n, s] : sizes) {
    if (n >= 2 && s > 0) pts.emplace_back(std::log(static_cast<double>(n)),
                                          std::log(static_cast<double>(s)));
  }
  if (pts.size() < 4) {
    throw UsageError("growth_fit needs at least 4 data points with n >= 2");
  }
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double num = 0, den = 0;
  for (const auto& [x, y] : pts) {
    num += (x - mx) * (y - my);
    den += (x - mx) * (x - mx);
  }
  if (den == 0) throw UsageError("growth_fit needs at least two distinct radii");
  return num / den;
}

double growth_fit_tail(const std::vector<std::pair<int, std::size_t>>& sizes) {
  std::vector<std::pair<int, std::size_t>> pts;
  for (const auto& p : sizes) {
    if (p.first >= 2 && p.second > 0) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  const std::size_t keep = std::max<std::size_t>(4, (pts.size() + 1) / 2);
  if (pts.size() > keep) pts.erase(pts.begin(), pts.end() - static_cast<std::ptrdiff_t>(keep));
  return growth_fit(pts);
}

std::string format_element(const Coords& g) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) os << ',';
    os << g[i];
  }
  return os.str();
}

Coords parse_element(std::string_view text) {
  Coords out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string_view::npos) next = text.size();
    std::string tok(text.substr(pos, next - pos));
    if (!tok.empty()) {
      std::size_t used = 0;
      std::int64_t v = 0;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
        throw UsageError("bad element coordinate '" + tok + "'");
      }
      if (used != tok.size()) throw UsageError("bad element coordinate '" + tok + "'");
      out.push_back(v);
    }
    if (next == text.size()) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace cdops
