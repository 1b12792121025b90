#include "finsheaf/grassmann.hpp"

#include <algorithm>
#include <set>

namespace finsheaf {

namespace {

struct StalkCandidate {
  Submodule module;
  std::vector<Vec> basis;
};

bool maps_into(const ModuleSheaf& e, Point x, Point y, const StalkCandidate& from, const Submodule& to) {
  for (const Vec& v : from.basis) {
    if (!to.contains(e.restrict_germ(x, y, v))) return false;
  }
  return true;
}

/// The open sets U_x with x maximal, i.e. the smallest cover by minimal opens.
std::vector<OpenSet> maximal_min_open_cover(const FinSpace& s) {
  std::vector<OpenSet> cover;
  for (Point x = 0; x < s.size(); ++x) {
    bool maximal = true;
    for (Point y = 0; y < s.size() && maximal; ++y) {
      maximal = y == x || !s.min_open(x).subset_of(s.min_open(y)) || s.min_open(x) == s.min_open(y);
    }
    if (maximal) cover.push_back(s.min_open(x));
  }
  return cover;
}

std::size_t find_sorted(const std::vector<VectorSubsheaf>& sorted, const VectorSubsheaf& t) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  return it != sorted.end() && *it == t ? static_cast<std::size_t>(it - sorted.begin()) : sorted.size();
}

GrassmannSection section_from_family(const GrassmannPresheaf& g, OpenSet u, const Section& family) {
  const FinSpace& s = g.space();
  GrassmannSection out{g.ambient(), u, std::vector<std::optional<VectorSubsheaf>>(static_cast<std::size_t>(s.size()))};
  std::size_t i = 0;
  for (Point x : u.points()) {
    out.family[static_cast<std::size_t>(x)] = g.values(s.min_open(x))[static_cast<std::size_t>(family[i++])];
  }
  return out;
}

}  // namespace

std::vector<VectorSubsheaf> enumerate_dimension_k_families(const ModuleSheafPtr& ambient, OpenSet u, int k,
                                                           SearchBudget& budget) {
  const ModuleSheaf& e = *ambient;
  const FinSpace& s = e.space();
  std::vector<std::vector<StalkCandidate>> cands(static_cast<std::size_t>(s.size()));
  for (Point x : u.points()) {
    for (auto& m : enumerate_free_submodules(e.base().stalk(x), e.rank(x), k)) {
      auto basis = m.basis();
      cands[static_cast<std::size_t>(x)].push_back({std::move(m), std::move(basis)});
    }
  }
  auto order = u.points();
  std::stable_sort(order.begin(), order.end(), [&](Point a, Point b) { return s.min_open(a).size() > s.min_open(b).size(); });

  std::vector<const StalkCandidate*> chosen(static_cast<std::size_t>(s.size()), nullptr);
  std::vector<VectorSubsheaf> out;
  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == order.size()) {
      std::vector<Submodule> stalks(static_cast<std::size_t>(s.size()));
      for (Point x : u.points()) stalks[static_cast<std::size_t>(x)] = chosen[static_cast<std::size_t>(x)]->module;
      out.emplace_back(ambient, u, std::move(stalks));
      return;
    }
    const Point x = order[depth];
    for (const StalkCandidate& c : cands[static_cast<std::size_t>(x)]) {
      budget.charge();
      bool ok = true;
      for (Point z : u.points()) {
        const StalkCandidate* cz = chosen[static_cast<std::size_t>(z)];
        if (z == x || !cz) continue;
        if (s.min_open(x).contains(z)) ok = maps_into(e, x, z, c, cz->module);
        if (ok && s.min_open(z).contains(x)) ok = maps_into(e, z, x, *cz, c.module);
        if (!ok) break;
      }
      if (!ok) continue;
      chosen[static_cast<std::size_t>(x)] = &c;
      self(self, depth + 1);
      chosen[static_cast<std::size_t>(x)] = nullptr;
    }
  };
  recurse(recurse, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VectorSubsheaf> enumerate_rank_k_subsheaves(const ModuleSheafPtr& ambient, OpenSet u, int k,
                                                        std::size_t budget) {
  SearchBudget b(budget);
  std::vector<VectorSubsheaf> out;
  for (auto& t : enumerate_dimension_k_families(ambient, u, k, b)) {
    if (is_locally_free(t, u, k, b)) out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------

GrassmannPresheaf::GrassmannPresheaf(AlgebraPtr base, int k, int n, GrassmannKind kind, std::size_t budget)
    : k_(k), n_(n), kind_(kind) {
  if (k < 0 || n < 0 || k > n) throw Error(ErrorKind::InvalidArgument, "need 0 <= k <= n");
  ambient_ = free_sheaf(base, n);
  const FinSpace& s = space();
  SearchBudget b(budget);
  for (OpenSet u : s.opens()) {
    std::vector<VectorSubsheaf> vals;
    for (auto& t : enumerate_dimension_k_families(ambient_, u, k, b)) {
      const bool keep = kind == GrassmannKind::Free ? is_free_of_rank(t, u, k, b).free : is_locally_free(t, u, k, b);
      if (keep) vals.push_back(std::move(t));
    }
    values_.push_back(std::move(vals));
  }
  std::vector<Carrier> carriers;
  for (const auto& v : values_) carriers.push_back(Carrier::set(static_cast<int>(v.size())));
  presheaf_ = std::make_shared<const Presheaf>(base->space_ptr(), std::move(carriers), [this](OpenSet from, OpenSet to) {
    ElementMap m;
    for (const auto& t : values(from)) {
      auto idx = index_of(to, t.restricted(to));
      if (!idx) throw Error(ErrorKind::InvalidPresheaf, "restriction leaves the Grassmann presheaf");
      m.push_back(static_cast<Element>(*idx));
    }
    return m;
  });
}

std::optional<std::size_t> GrassmannPresheaf::index_of(OpenSet u, const VectorSubsheaf& t) const {
  const auto& vals = values(u);
  const std::size_t i = find_sorted(vals, t);
  return i < vals.size() ? std::optional<std::size_t>(i) : std::nullopt;
}

GrassmannPresheaf build_grassmann_presheaf(const AlgebraPtr& a, int k, int n, std::size_t budget) {
  return GrassmannPresheaf(a, k, n, GrassmannKind::Free, budget);
}

GrassmannPresheaf build_v_presheaf(const AlgebraPtr& a, int k, int n, std::size_t budget) {
  GrassmannPresheaf v(a, k, n, GrassmannKind::LocallyFree, budget);
  if (!is_complete(v.as_presheaf(), budget)) throw Error(ErrorKind::InvalidPresheaf, "locally free Grassmann presheaf is not complete");
  return v;
}

GrassmannPresheaf build_universal_grassmann(const AlgebraPtr& a, int n, int truncation, std::size_t budget) {
  if (n > truncation) throw Error(ErrorKind::InvalidArgument, "rank exceeds the truncation");
  return GrassmannPresheaf(a, n, truncation, GrassmannKind::Free, budget);
}

// ---------------------------------------------------------------------------

GrassmannCheck check_monopresheaf_not_complete(const GrassmannPresheaf& g, std::size_t budget) {
  GrassmannCheck out;
  out.monopresheaf = is_monopresheaf(g.as_presheaf());
  SheafSpace sh(g.as_presheaf(), budget);
  bool complete = out.monopresheaf;
  for (OpenSet u : g.space().opens()) {
    if (u.empty()) continue;
    ++out.opens_checked;
    if (sh.unit_bijective(u)) continue;
    complete = false;
    if (out.witness) continue;
    std::set<Element> hit(sh.unit(u).begin(), sh.unit(u).end());
    const auto& fams = sh.families(u);
    for (std::size_t i = 0; i < fams.size(); ++i) {
      if (hit.count(static_cast<Element>(i))) continue;
      out.witness = CompletenessWitness{u, section_to_subsheaf(section_from_family(g, u, fams[i]))};
      break;
    }
  }
  out.complete = complete;
  return out;
}

bool check_lemma_2_2(const GrassmannPresheaf& g, const GrassmannPresheaf& v) {
  if (g.base_ptr() != v.base_ptr() || g.k() != v.k() || g.n() != v.n()) {
    throw Error(ErrorKind::InvalidArgument, "Grassmann presheaves of different shapes");
  }
  const FinSpace& s = g.space();
  for (Point x = 0; x < s.size(); ++x) {
    if (g.values(s.min_open(x)) != v.values(s.min_open(x))) return false;
  }
  for (OpenSet u : s.opens()) {
    for (const auto& t : v.values(u)) {
      for (Point x : u.points()) {
        if (!g.index_of(s.min_open(x), t.restricted(s.min_open(x)))) return false;
      }
    }
  }
  return true;
}

std::vector<GrassmannSection> enumerate_sections(const GrassmannPresheaf& g, OpenSet u, std::size_t budget) {
  SearchBudget b(budget);
  const auto stalks = StalkSystem::of(g.as_presheaf());
  std::vector<GrassmannSection> out;
  for (const auto& fam : compatible_families(stalks, u, b)) out.push_back(section_from_family(g, u, fam));
  return out;
}

GrassmannSection restrict_section(const GrassmannSection& s, OpenSet v) {
  if (!v.subset_of(s.domain)) throw Error(ErrorKind::InvalidArgument, "restriction to a larger open set");
  GrassmannSection out{s.ambient, v, std::vector<std::optional<VectorSubsheaf>>(s.family.size())};
  for (Point x : v.points()) out.family[static_cast<std::size_t>(x)] = s.family[static_cast<std::size_t>(x)];
  return out;
}

VectorSubsheaf section_to_subsheaf(const GrassmannSection& s) {
  std::vector<Submodule> stalks(s.family.size());
  for (Point x : s.domain.points()) stalks[static_cast<std::size_t>(x)] = s.at(x).stalk(x);
  return VectorSubsheaf(s.ambient, s.domain, std::move(stalks));
}

GrassmannSection subsheaf_to_section(const VectorSubsheaf& t, int k, std::size_t budget) {
  const FinSpace& s = t.ambient()->space();
  SearchBudget b(budget);
  GrassmannSection out{t.ambient(), t.domain(), std::vector<std::optional<VectorSubsheaf>>(static_cast<std::size_t>(s.size()))};
  for (Point x : t.domain().points()) {
    VectorSubsheaf local = t.restricted(s.min_open(x));
    if (!is_free_of_rank(local, s.min_open(x), k, b).free) {
      throw Error(ErrorKind::NotLocallyFree, "subsheaf is not free of rank " + std::to_string(k) + " near " + s.name(x));
    }
    out.family[static_cast<std::size_t>(x)] = std::move(local);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

EmbeddingCheck check_embedding(const std::string& label, const ModuleSheafPtr& e, const std::vector<OpenSet>& cover,
                               const WeightFamily& w, const ModuleSheafPtr& universe,
                               const std::vector<VectorSubsheaf>& subsheaves) {
  std::vector<ModuleMorphism> trivs;
  for (OpenSet u : cover) {
    std::map<Point, Matrix> comps;
    for (Point x : u.points()) comps.emplace(x, Matrix::identity(e->base().stalk(x), e->rank(x)));
    trivs.emplace_back(e, e, u, std::move(comps));
  }
  const ModuleMorphism f = embed_via_weights(e, cover, trivs, w);
  EmbeddingCheck out;
  out.label = label;
  out.cover_size = static_cast<int>(cover.size());
  out.monomorphism = is_monomorphism(f) && check_naturality(f).empty();
  const VectorSubsheaf image = image_subsheaf(f).padded(universe);
  out.found_among_subsheaves = find_sorted(subsheaves, image) < subsheaves.size();
  return out;
}

}  // namespace

Classification classify(const AlgebraPtr& a, int n, int truncation, std::size_t budget) {
  const GrassmannPresheaf g = build_universal_grassmann(a, n, truncation, budget);
  const OpenSet whole = g.space().whole();
  Classification out;
  out.n = n;
  out.truncation = truncation;
  const auto sections = enumerate_sections(g, whole, budget);
  out.subsheaf_list = enumerate_rank_k_subsheaves(g.ambient(), whole, n, budget);
  const auto& subs = out.subsheaf_list;
  out.sections = sections.size();
  out.subsheaves = subs.size();

  std::set<std::size_t> targets;
  bool all_found = true;
  out.round_trip = true;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const VectorSubsheaf t = section_to_subsheaf(sections[i]);
    const std::size_t j = find_sorted(subs, t);
    if (j == subs.size()) {
      all_found = false;
      out.round_trip = false;
      continue;
    }
    out.pairs.emplace_back(i, j);
    targets.insert(j);
    out.round_trip = out.round_trip && subsheaf_to_section(t, n, budget) == sections[i];
  }
  for (const auto& t : subs) out.round_trip = out.round_trip && section_to_subsheaf(subsheaf_to_section(t, n, budget)) == t;
  out.bijection = all_found && targets.size() == sections.size() && sections.size() == subs.size();

  const auto e = free_sheaf(a, n);
  const Element one = a->ring(whole)->one();
  if (n <= truncation) {
    out.embeddings.push_back(check_embedding("free, cover {X}", e, {whole}, WeightFamily{a, {whole}, {one}}, g.ambient(), subs));
  }
  const auto cover = maximal_min_open_cover(g.space());
  if (cover.size() > 1 && n * static_cast<int>(cover.size()) <= truncation) {
    const auto search = search_weight_families(a, cover, budget);
    if (!search.valid.empty()) {
      out.embeddings.push_back(check_embedding("free, minimal-open cover", e, cover, search.valid.front(), g.ambient(), subs));
    }
  }
  return out;
}

TruncationStep check_truncation_step(const AlgebraPtr& a, int n, int truncation, std::size_t budget) {
  const auto low = free_sheaf(a, truncation);
  const auto high = free_sheaf(a, truncation + 1);
  const OpenSet whole = a->space().whole();
  const auto subs_low = enumerate_rank_k_subsheaves(low, whole, n, budget);
  const auto subs_high = enumerate_rank_k_subsheaves(high, whole, n, budget);
  TruncationStep out;
  out.count_n = subs_low.size();
  out.count_next = subs_high.size();
  std::set<std::size_t> images;
  bool inside = true;
  for (const auto& t : subs_low) {
    const std::size_t j = find_sorted(subs_high, t.padded(high));
    if (j == subs_high.size()) inside = false;
    images.insert(j);
  }
  out.embeds = inside && images.size() == subs_low.size();
  return out;
}

}  // namespace finsheaf
