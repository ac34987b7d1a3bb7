#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdops/errors.hpp"
#include "cdops/rng.hpp"

namespace cdops {

/// Canonical integer-tuple encoding of a group element.
///  - IntegerLattice(d): (k1, ..., kd)
///  - Heisenberg3: (a, b, c) for the unitriangular matrix [[1,a,c],[0,1,b],[0,0,1]]
///  - FreeGroup2: freely reduced word of signed generator indices (1, -2, 1, ...)
using Coords = std::vector<std::int64_t>;

enum class GroupKind { IntegerLattice, Heisenberg3, FreeGroup2 };

struct CoordsHash {
  std::size_t operator()(const Coords& c) const noexcept {
    return static_cast<std::size_t>(hash_coords(c));
  }
};

/// Which finitely generated group to realize, plus enumeration budgets.
/// The generating set U is the symmetric standard one (lattice unit vectors,
/// the two Heisenberg generators x, y, or the two free generators, together
/// with all inverses).
struct GroupSpec {
  GroupKind kind = GroupKind::IntegerLattice;
  int dim = 1;  // lattice rank; ignored otherwise
  int max_radius = 12;
  std::size_t max_ball_elements = 5'000'000;
  bool allow_out_of_hypothesis = false;

  /// Parses "Z1", "Z2", "Z3", "H3", "F2". Sets the default radius budget
  /// (12 for lattices, 10 for H3, 8 for F2).
  static GroupSpec parse(std::string_view name);

  std::string name() const;
  bool polynomial_growth() const { return kind != GroupKind::FreeGroup2; }
  bool operator==(const GroupSpec& o) const {
    return kind == o.kind && (kind != GroupKind::IntegerLattice || dim == o.dim);
  }
};

/// Canonical sort key: (word length, lexicographic on coords). Keeping the
/// length explicit makes ball prefixes stable across radii and gives every
/// reduction a fixed, reproducible order.
using CanonicalKey = std::pair<int, Coords>;

class Group;

/// The word-metric ball B_n = U^n, canonically ordered, with element-to-index
/// lookup. Immutable once built; B_m is a prefix of B_n for m <= n.
class Ball {
 public:
  const GroupSpec& spec() const { return spec_; }
  int radius() const { return radius_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Coords>& elements() const { return elements_; }
  const Coords& at(std::size_t i) const { return elements_[i]; }

  bool contains(const Coords& g) const { return index_.count(g) != 0; }
  std::optional<std::size_t> index_of(const Coords& g) const {
    auto it = index_.find(g);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Word length of the element at position i (elements are stored layer by
  /// layer, so this is a lookup into the layer offsets).
  int word_length_at(std::size_t i) const;

  /// Number of elements of word length <= k, for k <= radius.
  std::size_t prefix_size(int k) const;

 private:
  friend class Group;
  GroupSpec spec_;
  int radius_ = 0;
  std::vector<Coords> elements_;
  std::vector<std::size_t> layer_end_;  // layer_end_[k] = |B_k|
  std::unordered_map<Coords, std::size_t, CoordsHash> index_;
};

/// A finitely generated group as a computable object: element arithmetic,
/// word metric via breadth-first search over the Cayley graph (layers are
/// memoized per instance), and Cayley-ball enumeration.
///
/// All methods are safe to call concurrently; cache extension is guarded by
/// an internal mutex and returned balls are immutable.
class Group {
 public:
  explicit Group(GroupSpec spec);

  static std::shared_ptr<const Group> make(GroupSpec spec);
  static std::shared_ptr<const Group> make(std::string_view name);

  const GroupSpec& spec() const { return spec_; }
  int max_radius() const { return spec_.max_radius; }

  Coords identity() const;
  bool is_identity(const Coords& g) const;

  /// Standard symmetric generators, identity excluded.
  const std::vector<Coords>& generators() const { return generators_; }

  Coords mul(const Coords& g, const Coords& h) const;
  Coords inv(const Coords& g) const;

  /// Minimal k with g in U^k. Throws OutOfRadiusError if g is not reachable
  /// within the configured max radius.
  int word_length(const Coords& g) const;

  /// As word_length, but returns nullopt instead of throwing when g lies
  /// outside B_limit (limit defaults to the configured max radius).
  std::optional<int> word_length_within(const Coords& g, int limit = -1) const;

  /// The ball B_n, memoized. Throws ResourceLimitError (with partial sizes in
  /// the message) if the element budget is exceeded, UsageError if n exceeds
  /// the configured max radius.
  std::shared_ptr<const Ball> ball(int n) const;

  /// |B_k| for k = 0..n, convenience for growth studies.
  std::vector<std::pair<int, std::size_t>> ball_sizes(int n) const;

  CanonicalKey key(const Coords& g) const { return {word_length(g), g}; }

  /// Validates that g encodes an element of this group (tuple arity, reduced
  /// word for F2). Throws UsageError otherwise.
  void check_element(const Coords& g) const;

 private:
  void validate(const Coords& g) const;
  // Extends memoized BFS layers to cover radius `target` (or until g is
  // found, if given). Caller must hold mu_.
  void extend_locked(int target) const;

  GroupSpec spec_;
  std::vector<Coords> generators_;

  mutable std::mutex mu_;
  mutable std::vector<std::vector<Coords>> layers_;  // layers_[k]: sorted, length-k elements
  mutable std::unordered_map<Coords, int, CoordsHash> length_of_;
  mutable std::map<int, std::shared_ptr<const Ball>> balls_;
  mutable std::size_t enumerated_ = 0;
};

/// Least-squares slope of log|B_n| against log n. Requires at least four
/// data points with n >= 2.
double growth_fit(const std::vector<std::pair<int, std::size_t>>& sizes);

/// growth_fit restricted to the trailing max(4, ceil(count/2)) points; the
/// small-radius points carry the lower-order terms of |B_n| and bias the
/// slope down, so asymptotic estimates use the upper window.
double growth_fit_tail(const std::vector<std::pair<int, std::size_t>>& sizes);

std::string format_element(const Coords& g);
Coords parse_element(std::string_view text);

}  // namespace cdops
