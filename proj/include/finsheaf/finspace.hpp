#pragma once

// Finite T0 spaces encoded by minimal open neighbourhoods.
//
// A finite space is determined by U_x, the smallest open set containing x.
// Opens are exactly the unions of minimal opens, and y in U_x means x lies in
// the closure of y (specialization). Everything downstream (stalks, sheaf
// sections, germs) reads the topology through min_open().

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsheaf/error.hpp"

namespace finsheaf {

using Point = int;
using PointMask = std::uint32_t;

inline constexpr int kMaxPointsHard = 32;

class OpenSet {
 public:
  constexpr OpenSet() = default;
  constexpr explicit OpenSet(PointMask bits) : bits_(bits) {}

  constexpr PointMask bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(Point x) const { return (bits_ >> x) & 1U; }
  constexpr bool subset_of(OpenSet other) const { return (bits_ & ~other.bits_) == 0; }
  int size() const { return std::popcount(bits_); }

  /// Points in increasing index order.
  std::vector<Point> points() const {
    std::vector<Point> out;
    for (PointMask b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend constexpr OpenSet operator&(OpenSet a, OpenSet b) { return OpenSet(a.bits_ & b.bits_); }
  friend constexpr OpenSet operator|(OpenSet a, OpenSet b) { return OpenSet(a.bits_ | b.bits_); }
  friend constexpr bool operator==(OpenSet, OpenSet) = default;

 private:
  PointMask bits_ = 0;
};

struct SpaceLimits {
  int max_points = 12;
  std::size_t max_opens = 4096;
};

class FinSpace;
using SpacePtr = std::shared_ptr<const FinSpace>;

class FinSpace {
 public:
  /// Validates the three minimal-open invariants and enumerates the opens.
  /// Throws PointMissingFromOwnNeighborhood, MinOpenNotOpen, NotT0 or SpaceTooLarge.
  static SpacePtr build(const std::vector<std::string>& points,
                        const std::map<std::string, std::vector<std::string>>& min_open,
                        SpaceLimits limits = {});

  static SpacePtr build(std::vector<std::string> names, std::vector<PointMask> min_open,
                        SpaceLimits limits = {});

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(Point x) const { return names_.at(static_cast<std::size_t>(x)); }
  const std::vector<std::string>& names() const { return names_; }
  Point index_of(const std::string& name) const;

  OpenSet min_open(Point x) const { return OpenSet(min_open_.at(static_cast<std::size_t>(x))); }
  OpenSet whole() const { return OpenSet(size() == 32 ? ~PointMask{0} : ((PointMask{1} << size()) - 1)); }
  bool is_open(PointMask subset) const;

  /// Every open exactly once: sorted by size, then lexicographically on the
  /// sorted point indices. Starts with the empty set, ends with the whole space.
  const std::vector<OpenSet>& opens() const { return opens_; }
  int open_count() const { return static_cast<int>(opens_.size()); }
  int open_index(OpenSet u) const;

  /// y specializes x (x in the closure of y) iff y lies in U_x.
  bool specializes(Point x, Point y) const { return min_open(x).contains(y); }

  /// Key used in JSON documents: point names sorted and joined by commas.
  std::string key(OpenSet u) const;
  OpenSet open_from_names(const std::vector<std::string>& names) const;

 private:
  FinSpace() = default;

  std::vector<std::string> names_;
  std::vector<PointMask> min_open_;
  std::vector<OpenSet> opens_;
  std::unordered_map<PointMask, int> open_index_;
};

/// Brute force over all subsets. Throws SpaceTooLarge past the open-count bound.
std::vector<OpenSet> enumerate_opens(const FinSpace& space, std::size_t max_opens = 4096);

bool is_connected(const FinSpace& space);

/// One-point space {name}.
SpacePtr point_space(const std::string& name = "p");
/// Points with min_open(x) = {x}.
SpacePtr discrete_space(const std::vector<std::string>& names);
/// Sierpinski space: {o} open, c closed.
SpacePtr sierpinski_space();
/// Chain p0 < p1 < ... where min_open(p_i) = {p0..p_i}.
SpacePtr chain_space(int length);
/// Four-point model of the circle: a, b open; c, d closed with U_c = {a,b,c}, U_d = {a,b,d}.
SpacePtr pseudo_circle();

class ContinuousMap {
 public:
  ContinuousMap(SpacePtr domain, SpacePtr codomain, std::vector<Point> assignment);

  static ContinuousMap constant(SpacePtr domain, SpacePtr codomain, Point value);
  static ContinuousMap identity(SpacePtr space);

  const FinSpace& domain() const { return *domain_; }
  const FinSpace& codomain() const { return *codomain_; }
  const SpacePtr& domain_ptr() const { return domain_; }
  const SpacePtr& codomain_ptr() const { return codomain_; }
  Point operator()(Point y) const { return assignment_.at(static_cast<std::size_t>(y)); }
  const std::vector<Point>& assignment() const { return assignment_; }

 private:
  SpacePtr domain_;
  SpacePtr codomain_;
  std::vector<Point> assignment_;
};

/// f(U_x) is contained in U_{f(x)} for every x.
bool validate_map(const ContinuousMap& f);

}  // namespace finsheaf
