#include "finsheaf/json_io.hpp"

#include <fstream>
#include <sstream>

namespace finsheaf {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) parse_fail(std::string("expected an object holding \"") + name + "\"");
  auto it = j.find(name);
  if (it == j.end()) parse_fail(std::string("missing field \"") + name + "\"");
  return *it;
}

int as_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) parse_fail(what + " must be an integer");
  return j.get<int>();
}

std::string as_string(const Json& j, const std::string& what) {
  if (!j.is_string()) parse_fail(what + " must be a string");
  return j.get<std::string>();
}

std::vector<std::string> as_strings(const Json& j, const std::string& what) {
  if (!j.is_array()) parse_fail(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(as_string(e, what));
  return out;
}

std::vector<int> as_ints(const Json& j, const std::string& what) {
  if (!j.is_array()) parse_fail(what + " must be an array of integers");
  std::vector<int> out;
  for (const auto& e : j) out.push_back(as_int(e, what));
  return out;
}

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> out;
  if (key.empty()) return out;
  std::stringstream ss(key);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

OpenSet open_from_key(const FinSpace& s, const std::string& key) { return s.open_from_names(split_key(key)); }

std::pair<int, int> parse_pair_key(const std::string& key) {
  const auto parts = split_key(key);
  if (parts.size() != 2) parse_fail("transition key \"" + key + "\" must look like \"i,j\"");
  try {
    return {std::stoi(parts[0]), std::stoi(parts[1])};
  } catch (const std::exception&) {
    parse_fail("transition key \"" + key + "\" must hold two integers");
  }
}

/// An element of A(U) given as a code or as a germ array.
Element parse_section_entry(const Json& j, const AlgebraSheaf& a, OpenSet u) {
  const RingPtr& r = a.ring(u);
  if (j.is_number_integer()) {
    const int v = j.get<int>();
    if (v < 0 || v >= r->size()) throw Error(ErrorKind::ValidationError, "element code out of range over {" + a.space().key(u) + "}");
    return v;
  }
  const auto germs = as_ints(j, "germ array");
  if (germs.size() != static_cast<std::size_t>(u.size())) {
    throw Error(ErrorKind::ValidationError, "germ array needs one entry per point of {" + a.space().key(u) + "}");
  }
  auto glued = a.glue(u, Section(germs.begin(), germs.end()));
  if (!glued) throw Error(ErrorKind::ValidationError, "germs do not glue to a section over {" + a.space().key(u) + "}");
  return *glued;
}

class RingCache {
 public:
  RingPtr get(const Json& j) {
    const std::string key = j.dump();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, parse_ring(j)).first->second;
  }

 private:
  std::map<std::string, RingPtr> cache_;
};

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    parse_fail(path + ": " + e.what());
  }
}

SpacePtr parse_space(const Json& j, SpaceLimits limits) {
  const auto points = as_strings(field(j, "points"), "points");
  const Json& mo = field(j, "min_open");
  if (!mo.is_object()) parse_fail("min_open must be an object");
  std::map<std::string, std::vector<std::string>> min_open;
  for (const auto& [name, members] : mo.items()) min_open[name] = as_strings(members, "min_open entry");
  return FinSpace::build(points, min_open, limits);
}

Json space_to_json(const FinSpace& s) {
  Json mo = Json::object();
  for (Point x = 0; x < s.size(); ++x) {
    Json members = Json::array();
    for (Point y : s.min_open(x).points()) members.push_back(s.name(y));
    mo[s.name(x)] = members;
  }
  return Json{{"points", s.names()}, {"min_open", mo}};
}

RingPtr parse_ring(const Json& j) {
  const std::string kind = as_string(field(j, "kind"), "ring kind");
  if (kind == "Fp") return make_field(as_int(field(j, "p"), "p"));
  if (kind == "Zm") return make_mod_ring(as_int(field(j, "m"), "m"));
  if (kind == "quotient") return make_quotient(as_int(field(j, "p"), "p"), as_ints(field(j, "poly"), "poly"));
  if (kind == "product") return make_product(parse_ring(field(j, "left")), parse_ring(field(j, "right")));
  if (kind == "zero") return make_zero_ring();
  parse_fail("unknown ring kind \"" + kind + "\"");
}

Presheaf parse_presheaf(const Json& j, const SpacePtr& space) {
  const FinSpace& s = *space;
  const Json& cj = field(j, "carriers");
  if (!cj.is_object()) parse_fail("carriers must be an object keyed by open set");
  RingCache rings;
  std::map<PointMask, Carrier> by_open;
  for (const auto& [key, c] : cj.items()) {
    const OpenSet u = open_from_key(s, key);
    const std::string kind = as_string(field(c, "kind"), "carrier kind");
    Carrier carrier;
    if (kind == "set") {
      const int n = as_int(field(c, "size"), "carrier size");
      if (n < 0) throw Error(ErrorKind::InvalidPresheaf, "negative carrier size");
      carrier = Carrier::set(n);
    } else if (kind == "ring") {
      carrier = Carrier::of(rings.get(field(c, "ring")));
    } else if (kind == "module") {
      carrier = Carrier::of(FinModule::free(rings.get(field(c, "ring")), as_int(field(c, "rank"), "module rank")));
    } else {
      parse_fail("unknown carrier kind \"" + kind + "\"");
    }
    if (!by_open.emplace(u.bits(), carrier).second) parse_fail("carrier for {" + s.key(u) + "} given twice");
  }
  std::vector<Carrier> carriers;
  for (OpenSet u : s.opens()) {
    auto it = by_open.find(u.bits());
    if (it == by_open.end()) throw Error(ErrorKind::InvalidPresheaf, "no carrier for {" + s.key(u) + "}");
    carriers.push_back(it->second);
  }

  std::map<std::pair<PointMask, PointMask>, ElementMap> listed;
  if (j.contains("restrictions")) {
    const Json& rj = j["restrictions"];
    if (!rj.is_array()) parse_fail("restrictions must be an array");
    for (const auto& r : rj) {
      const OpenSet from = open_from_key(s, as_string(field(r, "from"), "from"));
      const OpenSet to = open_from_key(s, as_string(field(r, "to"), "to"));
      if (!to.subset_of(from)) throw Error(ErrorKind::InvalidPresheaf, "restriction target is not contained in its source");
      listed[{from.bits(), to.bits()}] = as_ints(field(r, "map"), "restriction map");
    }
  }

  std::map<std::pair<PointMask, PointMask>, std::optional<ElementMap>> memo;
  auto carrier_of = [&](OpenSet u) -> const Carrier& { return carriers[static_cast<std::size_t>(s.open_index(u))]; };
  auto resolve = [&](auto&& self, OpenSet u, OpenSet v) -> std::optional<ElementMap> {
    const std::pair key{u.bits(), v.bits()};
    if (auto it = listed.find(key); it != listed.end()) return it->second;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::optional<ElementMap> out;
    const int n = carrier_of(u).size;
    if (u == v) {
      out = ElementMap(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) (*out)[static_cast<std::size_t>(i)] = i;
    } else if (carrier_of(v).size == 1) {
      out = ElementMap(static_cast<std::size_t>(n), 0);
    } else {
      for (OpenSet w : s.opens()) {
        if (w == u || w == v || !v.subset_of(w) || !w.subset_of(u)) continue;
        auto first = self(self, u, w);
        if (!first) continue;
        auto second = self(self, w, v);
        if (!second) continue;
        ElementMap m;
        for (Element a : *first) {
          if (a < 0 || static_cast<std::size_t>(a) >= second->size()) throw Error(ErrorKind::InvalidPresheaf, "restriction value out of range");
          m.push_back((*second)[static_cast<std::size_t>(a)]);
        }
        out = std::move(m);
        break;
      }
    }
    memo[key] = out;
    return out;
  };
  return Presheaf(space, carriers, [&](OpenSet from, OpenSet to) {
    auto m = resolve(resolve, from, to);
    if (!m) throw Error(ErrorKind::InvalidPresheaf, "no restriction from {" + s.key(from) + "} to {" + s.key(to) + "}");
    return *m;
  });
}

TransitionCocycle parse_cocycle(const Json& j, const AlgebraPtr& a) {
  const FinSpace& s = a->space();
  TransitionCocycle c;
  c.base = a;
  const Json& cover = field(j, "cover");
  if (!cover.is_array()) parse_fail("cover must be an array of point lists");
  for (const auto& u : cover) c.cover.push_back(s.open_from_names(as_strings(u, "cover member")));
  c.rank = as_int(field(j, "rank"), "rank");
  if (c.rank < 0) throw Error(ErrorKind::ValidationError, "rank must be nonnegative");
  const Json& tj = field(j, "transitions");
  if (!tj.is_object()) parse_fail("transitions must be an object keyed by \"i,j\"");
  for (const auto& [key, rows] : tj.items()) {
    const auto [i, jj] = parse_pair_key(key);
    const int m = static_cast<int>(c.cover.size());
    if (i < 0 || jj < 0 || i >= m || jj >= m) throw Error(ErrorKind::ValidationError, "transition index out of range in \"" + key + "\"");
    const OpenSet uij = c.cover[static_cast<std::size_t>(i)] & c.cover[static_cast<std::size_t>(jj)];
    if (!rows.is_array()) parse_fail("transition matrix must be an array of rows");
    std::vector<std::vector<Element>> entries;
    for (const auto& row : rows) {
      if (!row.is_array()) parse_fail("transition matrix rows must be arrays");
      std::vector<Element> r;
      for (const auto& e : row) r.push_back(parse_section_entry(e, *a, uij));
      entries.push_back(std::move(r));
    }
    for (const auto& r : entries) {
      if (r.size() != entries.size()) throw Error(ErrorKind::ValidationError, "transition \"" + key + "\" is not square");
    }
    c.transitions.emplace(std::pair{i, jj}, entries.empty() ? Matrix(a->ring(uij), 0, 0) : Matrix::from_rows(a->ring(uij), entries));
  }
  return c;
}

WeightFamily parse_weights(const Json& j, const AlgebraPtr& a, const std::vector<OpenSet>& cover) {
  const Json& wj = field(j, "weights");
  if (!wj.is_object()) parse_fail("weights must be an object keyed by cover index");
  WeightFamily w{a, cover, std::vector<Element>(cover.size(), a->ring(a->space().whole())->zero())};
  std::vector<char> seen(cover.size(), 0);
  for (const auto& [key, entry] : wj.items()) {
    std::size_t i = 0;
    try {
      i = static_cast<std::size_t>(std::stoul(key));
    } catch (const std::exception&) {
      parse_fail("weight key \"" + key + "\" is not an index");
    }
    if (i >= cover.size()) throw Error(ErrorKind::InvalidWeights, "weight index " + key + " outside the cover");
    w.weights[i] = parse_section_entry(entry, *a, a->space().whole());
    seen[i] = 1;
  }
  for (std::size_t i = 0; i < cover.size(); ++i) {
    if (!seen[i]) throw Error(ErrorKind::InvalidWeights, "missing weight for cover member " + std::to_string(i));
  }
  return w;
}

ContinuousMap parse_map(const Json& j, const SpacePtr& codomain, SpaceLimits limits) {
  const SpacePtr domain = parse_space(field(j, "domain"), limits);
  const Json& aj = field(j, "assignment");
  if (!aj.is_object()) parse_fail("assignment must be an object");
  std::vector<Point> assignment(static_cast<std::size_t>(domain->size()), -1);
  for (const auto& [y, x] : aj.items()) {
    assignment[static_cast<std::size_t>(domain->index_of(y))] = codomain->index_of(as_string(x, "assignment target"));
  }
  for (Point y = 0; y < domain->size(); ++y) {
    if (assignment[static_cast<std::size_t>(y)] < 0) throw Error(ErrorKind::ValidationError, "map is undefined at " + domain->name(y));
  }
  ContinuousMap f(domain, codomain, std::move(assignment));
  if (!validate_map(f)) throw Error(ErrorKind::ValidationError, "map is not continuous");
  return f;
}

AlgebraPair parse_algebras(const Json& j) {
  return AlgebraPair{parse_ring(field(j, "a0")), parse_ring(field(j, "a1")), as_ints(field(j, "rho"), "rho")};
}

Json ring_to_json(const FinRing& r) {
  return Json{{"name", r.name()}, {"size", r.size()}, {"field", r.is_field()}};
}

Json carrier_to_json(const Carrier& c) {
  Json out{{"kind", std::string(to_string(c.kind))}, {"size", c.size}};
  if (c.kind == CarrierKind::Ring) out["ring"] = c.ring->name();
  if (c.kind == CarrierKind::Module) out["scalars"] = c.module->scalars()->name();
  return out;
}

Json open_to_json(const FinSpace& s, OpenSet u) {
  Json out = Json::array();
  for (Point x : u.points()) out.push_back(s.name(x));
  return out;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json subsheaf_to_json(const VectorSubsheaf& t) {
  const FinSpace& s = t.ambient()->space();
  Json out = Json::object();
  for (Point x : t.domain().points()) {
    const Submodule& sx = t.stalk(x);
    Json basis = Json::array();
    for (const Vec& v : sx.ring()->is_field() ? sx.basis() : sx.vectors()) basis.push_back(v);
    out[s.name(x)] = basis;
  }
  return out;
}

}  // namespace finsheaf
