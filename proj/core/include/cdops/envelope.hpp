#pragma once

#include <map>
#include <memory>
#include <vector>

#include "cdops/group.hpp"

namespace cdops {

/// A finitely supported nonnegative function a: G -> [0, inf), the dominating
/// sequence of a convolution-dominated operator. Support is kept inside the
/// group's configured ball; entries are stored in canonical (word length,
/// lexicographic) order so every reduction has a fixed summation order.
class Envelope {
 public:
  /// Detached empty envelope (no group); usable only as a placeholder.
  Envelope() = default;
  explicit Envelope(std::shared_ptr<const Group> group);

  static Envelope delta(std::shared_ptr<const Group> group, const Coords& g,
                        double value = 1.0);

  const std::shared_ptr<const Group>& group() const { return group_; }

  /// Sets a(g) = v (v >= 0; v == 0 erases). Throws OutOfRadiusError if g is
  /// beyond the configured max radius, UsageError if v < 0.
  void set(const Coords& g, double v);
  void add(const Coords& g, double v);

  double at(const Coords& g) const;
  bool empty() const { return values_.empty(); }
  std::size_t support_size() const { return values_.size(); }
  int support_radius() const;

  /// Entries in canonical order; key is (word length, coords).
  const std::map<CanonicalKey, double>& values() const { return values_; }

  double l1_norm() const;

  /// Sum of a over the sphere wl(z) == k for k = 0..support_radius. The
  /// resummation of the CD norm by word length (l1 of the result equals
  /// l1_norm of the input exactly, same addends).
  std::vector<double> sphere_sums() const;

 private:
  std::shared_ptr<const Group> group_;
  std::map<CanonicalKey, double> values_;
};

/// Exact convolution over the finite supports,
/// (a * b)(x) = sum_y a(x y^-1) b(y).
/// Throws TruncationError if the product support would leave the configured
/// ball (never truncates silently) and UsageError on group mismatch.
Envelope convolve(const Envelope& a, const Envelope& b);

std::vector<double> sphere_sums(const Envelope& a);

}  // namespace cdops
