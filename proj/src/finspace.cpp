#include "finsheaf/finspace.hpp"

#include <algorithm>
#include <numeric>

namespace finsheaf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MinOpenNotOpen: return "MinOpenNotOpen";
    case ErrorKind::NotT0: return "NotT0";
    case ErrorKind::PointMissingFromOwnNeighborhood: return "PointMissingFromOwnNeighborhood";
    case ErrorKind::UnknownPoint: return "UnknownPoint";
    case ErrorKind::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::InvalidPolynomial: return "InvalidPolynomial";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NotAField: return "NotAField";
    case ErrorKind::RingAxiomViolated: return "RingAxiomViolated";
    case ErrorKind::InvalidMorphism: return "InvalidMorphism";
    case ErrorKind::InvalidPresheaf: return "InvalidPresheaf";
    case ErrorKind::CocycleConditionViolated: return "CocycleConditionViolated";
    case ErrorKind::InvalidWeights: return "InvalidWeights";
    case ErrorKind::TrivializationMismatch: return "TrivializationMismatch";
    case ErrorKind::NotLocallyFree: return "NotLocallyFree";
    case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

namespace {

bool open_order(OpenSet a, OpenSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  auto pa = a.points();
  auto pb = b.points();
  return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
}

}  // namespace

SpacePtr FinSpace::build(const std::vector<std::string>& points,
                         const std::map<std::string, std::vector<std::string>>& min_open,
                         SpaceLimits limits) {
  std::map<std::string, Point> index;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!index.emplace(points[i], static_cast<Point>(i)).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate point '" + points[i] + "'");
    }
  }
  std::vector<PointMask> masks(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto it = min_open.find(points[i]);
    if (it == min_open.end()) {
      throw Error(ErrorKind::PointMissingFromOwnNeighborhood,
                  "no minimal open given for '" + points[i] + "'");
    }
    for (const auto& y : it->second) {
      auto jt = index.find(y);
      if (jt == index.end()) throw Error(ErrorKind::UnknownPoint, "unknown point '" + y + "'");
      masks[i] |= PointMask{1} << jt->second;
    }
  }
  for (const auto& [name, _] : min_open) {
    if (!index.contains(name)) throw Error(ErrorKind::UnknownPoint, "unknown point '" + name + "'");
  }
  return build(points, std::move(masks), limits);
}

SpacePtr FinSpace::build(std::vector<std::string> names, std::vector<PointMask> min_open,
                         SpaceLimits limits) {
  const int n = static_cast<int>(names.size());
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "a space needs at least one point");
  if (n > std::min(limits.max_points, kMaxPointsHard)) {
    throw Error(ErrorKind::SpaceTooLarge, std::to_string(n) + " points exceeds the limit of " +
                                              std::to_string(limits.max_points));
  }
  if (min_open.size() != names.size()) {
    throw Error(ErrorKind::InvalidArgument, "min_open must have one entry per point");
  }
  for (Point x = 0; x < n; ++x) {
    OpenSet ux(min_open[x]);
    if (!ux.contains(x)) {
      throw Error(ErrorKind::PointMissingFromOwnNeighborhood, "'" + names[x] + "' not in its own minimal open");
    }
    for (Point y : ux.points()) {
      if (y >= n) throw Error(ErrorKind::UnknownPoint, "minimal open of '" + names[x] + "' has a stray point");
      if (!OpenSet(min_open[y]).subset_of(ux)) {
        throw Error(ErrorKind::MinOpenNotOpen,
                    "U_" + names[y] + " is not contained in U_" + names[x]);
      }
    }
    for (Point y = 0; y < x; ++y) {
      if (min_open[x] == min_open[y]) {
        throw Error(ErrorKind::NotT0, "'" + names[x] + "' and '" + names[y] + "' share a minimal open");
      }
    }
  }

  auto space = std::shared_ptr<FinSpace>(new FinSpace());
  space->names_ = std::move(names);
  space->min_open_ = std::move(min_open);
  space->opens_ = enumerate_opens(*space, limits.max_opens);
  for (std::size_t i = 0; i < space->opens_.size(); ++i) {
    space->open_index_.emplace(space->opens_[i].bits(), static_cast<int>(i));
  }
  return space;
}

Point FinSpace::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorKind::UnknownPoint, "unknown point '" + name + "'");
  return static_cast<Point>(it - names_.begin());
}

bool FinSpace::is_open(PointMask subset) const {
  for (PointMask b = subset; b != 0; b &= b - 1) {
    if ((min_open_[std::countr_zero(b)] & ~subset) != 0) return false;
  }
  return true;
}

int FinSpace::open_index(OpenSet u) const {
  auto it = open_index_.find(u.bits());
  if (it == open_index_.end()) throw Error(ErrorKind::InvalidArgument, "set " + key(u) + " is not open");
  return it->second;
}

std::string FinSpace::key(OpenSet u) const {
  std::vector<std::string> ns;
  for (Point x : u.points()) ns.push_back(names_[x]);
  std::sort(ns.begin(), ns.end());
  std::string out;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i) out += ',';
    out += ns[i];
  }
  return out;
}

OpenSet FinSpace::open_from_names(const std::vector<std::string>& names) const {
  PointMask m = 0;
  for (const auto& n : names) m |= PointMask{1} << index_of(n);
  if (!is_open(m)) throw Error(ErrorKind::InvalidArgument, "set " + key(OpenSet(m)) + " is not open");
  return OpenSet(m);
}

std::vector<OpenSet> enumerate_opens(const FinSpace& space, std::size_t max_opens) {
  std::vector<OpenSet> out;
  const PointMask full = space.whole().bits();
  for (std::uint64_t s = 0; s <= full; ++s) {
    auto m = static_cast<PointMask>(s);
    if (space.is_open(m)) {
      out.emplace_back(m);
      if (out.size() > max_opens) {
        throw Error(ErrorKind::SpaceTooLarge,
                    "more than " + std::to_string(max_opens) + " open sets");
      }
    }
  }
  std::sort(out.begin(), out.end(), open_order);
  return out;
}

bool is_connected(const FinSpace& space) {
  // Components of the specialization graph; an open union of components is clopen.
  const int n = space.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (Point x = 0; x < n; ++x) {
    for (Point y : space.min_open(x).points()) parent[find(x)] = find(y);
  }
  for (Point x = 1; x < n; ++x) {
    if (find(x) != find(0)) return false;
  }
  return true;
}

SpacePtr point_space(const std::string& name) { return FinSpace::build({name}, {PointMask{1}}); }

SpacePtr discrete_space(const std::vector<std::string>& names) {
  std::vector<PointMask> masks;
  for (std::size_t i = 0; i < names.size(); ++i) masks.push_back(PointMask{1} << i);
  return FinSpace::build(names, std::move(masks));
}

SpacePtr sierpinski_space() { return FinSpace::build({"o", "c"}, std::vector<PointMask>{0b01, 0b11}); }

SpacePtr chain_space(int length) {
  std::vector<std::string> names;
  std::vector<PointMask> masks;
  for (int i = 0; i < length; ++i) {
    names.push_back("p" + std::to_string(i));
    masks.push_back((PointMask{1} << (i + 1)) - 1);
  }
  return FinSpace::build(std::move(names), std::move(masks));
}

SpacePtr pseudo_circle() {
  return FinSpace::build({"a", "b", "c", "d"}, std::vector<PointMask>{0b0001, 0b0010, 0b0111, 0b1011});
}

ContinuousMap::ContinuousMap(SpacePtr domain, SpacePtr codomain, std::vector<Point> assignment)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), assignment_(std::move(assignment)) {
  if (static_cast<int>(assignment_.size()) != domain_->size()) {
    throw Error(ErrorKind::InvalidArgument, "map assignment must cover every domain point");
  }
  for (Point x : assignment_) {
    if (x < 0 || x >= codomain_->size()) throw Error(ErrorKind::UnknownPoint, "map value out of range");
  }
}

ContinuousMap ContinuousMap::constant(SpacePtr domain, SpacePtr codomain, Point value) {
  std::vector<Point> a(static_cast<std::size_t>(domain->size()), value);
  return ContinuousMap(std::move(domain), std::move(codomain), std::move(a));
}

ContinuousMap ContinuousMap::identity(SpacePtr space) {
  std::vector<Point> a(static_cast<std::size_t>(space->size()));
  std::iota(a.begin(), a.end(), 0);
  return ContinuousMap(space, space, std::move(a));
}

bool validate_map(const ContinuousMap& f) {
  for (Point y = 0; y < f.domain().size(); ++y) {
    const OpenSet target = f.codomain().min_open(f(y));
    for (Point z : f.domain().min_open(y).points()) {
      if (!target.contains(f(z))) return false;
    }
  }
  return true;
}

}  // namespace finsheaf
