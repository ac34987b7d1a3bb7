#include "cdops/envelope.hpp"

#include <set>

namespace cdops {

Envelope::Envelope(std::shared_ptr<const Group> group) : group_(std::move(group)) {
  if (!group_) throw UsageError("envelope needs a group");
}

Envelope Envelope::delta(std::shared_ptr<const Group> group, const Coords& g, double value) {
  Envelope e(std::move(group));
  e.set(g, value);
  return e;
}

void Envelope::set(const Coords& g, double v) {
  if (!group_) throw UsageError("envelope has no group");
  if (v < 0) throw UsageError("envelope values must be nonnegative");
  auto key = group_->key(g);  // throws OutOfRadius beyond the budget
  if (v == 0) {
    values_.erase(key);
  } else {
    values_[key] = v;
  }
}

void Envelope::add(const Coords& g, double v) {
  if (!group_) throw UsageError("envelope has no group");
  auto key = group_->key(g);
  double next = values_.count(key) ? values_[key] + v : v;
  if (next < 0) throw UsageError("envelope values must be nonnegative");
  if (next == 0) {
    values_.erase(key);
  } else {
    values_[key] = next;
  }
}

double Envelope::at(const Coords& g) const {
  if (!group_) return 0.0;
  auto wl = group_->word_length_within(g);
  if (!wl) return 0.0;
  auto it = values_.find({*wl, g});
  return it == values_.end() ? 0.0 : it->second;
}

int Envelope::support_radius() const {
  return values_.empty() ? 0 : values_.rbegin()->first.first;
}

double Envelope::l1_norm() const {
  double s = 0;
  for (const auto& [k, v] : values_) s += v;
  return s;
}

std::vector<double> Envelope::sphere_sums() const {
  std::vector<double> b(static_cast<std::size_t>(support_radius()) + 1, 0.0);
  for (const auto& [k, v] : values_) b[static_cast<std::size_t>(k.first)] += v;
  return b;
}

std::vector<double> sphere_sums(const Envelope& a) { return a.sphere_sums(); }

Envelope convolve(const Envelope& a, const Envelope& b) {
  const auto& g = a.group();
  if (!(g->spec() == b.group()->spec())) {
    throw UsageError("convolve: envelopes live on different groups");
  }
  // Collect the product support first so each output value is accumulated in
  // one pass over supp(b) in canonical order.
  std::set<CanonicalKey> support;
  for (const auto& [ka, va] : a.values()) {
    for (const auto& [kb, vb] : b.values()) {
      Coords p = g->mul(ka.second, kb.second);
      auto wl = g->word_length_within(p);
      if (!wl) {
        throw TruncationError("convolution support leaves B_" +
                              std::to_string(g->max_radius()) + " at element " +
                              format_element(p));
      }
      support.insert({*wl, std::move(p)});
    }
  }
  Envelope out(g);
  for (const auto& key : support) {
    double s = 0;
    for (const auto& [kb, vb] : b.values()) {
      // a(x y^-1) b(y)
      s += a.at(g->mul(key.second, g->inv(kb.second))) * vb;
    }
    out.set(key.second, s);
  }
  return out;
}

}  // namespace cdops
