// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "finsheaf/cli.hpp"
#include "oracles.hpp"

using namespace finsheaf;

namespace {

const std::string kData = FINSHEAF_DATA_DIR;

/// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

struct Instance {
  std::string label;
  SpacePtr space;
};

std::vector<Instance> corpus() {
  return {{"point", point_space()},
          {"sierpinski", sierpinski_space()},
          {"chain3", chain_space(3)},
          {"discrete2", discrete_space({"x", "y"})},
          {"pseudo_circle", pseudo_circle()}};
}

const std::vector<std::pair<int, int>> kRanks = {{1, 2}, {1, 3}, {2, 3}};

std::string tag(const Instance& inst, int q, int k, int n) {
  return inst.label + "/F" + std::to_string(q) + "/k=" + std::to_string(k) + ",n=" + std::to_string(n);
}

// 1. The two-algebra sheaf on the Sierpinski space: stalks of size 4 and 2,
// no ring isomorphism between them, non-isomorphic pullbacks along the two
// (homotopic) constant maps. Under one second.
void criterion_1(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const Json j = demo_counterexample();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(j["stalk_sizes"]["c"] == 4, "stalk at c has 4 elements");
  c.expect(j["stalk_sizes"]["o"] == 2, "stalk at o has 2 elements");
  c.expect(j["stalk_isomorphism"]["exists"] == false, "no stalk isomorphism");
  c.expect(j["pullbacks"]["isomorphic"] == false, "pullbacks not isomorphic");
  c.expect(j["unit_bijective_on_nonempty_opens"] == true, "sheafification unit bijective");
  c.expect(j["pullbacks"]["constant_at_x0"]["global_sections"] == 4, "pullback at c has 4 sections");
  c.expect(j["pullbacks"]["constant_at_x1"]["global_sections"] == 2, "pullback at o has 2 sections");
  c.expect(secs < 1.0, "demo under one second");

  // The same through the public pieces directly.
  const auto s = sierpinski_space();
  const Presheaf p = two_algebra_presheaf(s, s->index_of("c"), make_quotient(2, {0, 0, 1}), make_field(2), {0, 1, 0, 1});
  const SheafSpace sh = sheafify(p);
  const auto pt = point_space();
  const Presheaf at_c = pullback(sh.sections(), ContinuousMap::constant(pt, s, s->index_of("c")));
  const Presheaf at_o = pullback(sh.sections(), ContinuousMap::constant(pt, s, s->index_of("o")));
  c.expect(!find_ring_isomorphism(at_c.carrier(pt->whole()).ring, at_o.carrier(pt->whole()).ring),
           "direct pullbacks not isomorphic");
}

// 2. Over the point, global sections of G(k,n) number [n choose k]_q.
void criterion_2(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  for (int q : {2, 3}) {
    const auto a = AlgebraSheaf::constant(point_space(), make_field(q));
    for (int n = 0; n <= 4; ++n) {
      for (int k = 0; k <= n; ++k) {
        const GrassmannPresheaf g = build_grassmann_presheaf(a, k, n);
        const std::size_t sections = enumerate_sections(g, a->space().whole()).size();
        const std::string label = "q=" + std::to_string(q) + " n=" + std::to_string(n) + " k=" + std::to_string(k);
        c.expect(sections == oracle::gaussian_binomial(q, n, k), label + " matches Gaussian binomial");
        c.expect(sections == enumerate_free_submodules(make_field(q), n, k).size(), label + " matches subspace list");
      }
    }
  }
  // Frozen values.
  const auto count = [](int q, int k, int n) {
    const auto a = AlgebraSheaf::constant(point_space(), make_field(q));
    return enumerate_sections(build_grassmann_presheaf(a, k, n), a->space().whole()).size();
  };
  c.expect(count(2, 1, 2) == 3, "G_F2(1,2) = 3");
  c.expect(count(2, 2, 4) == 35, "G_F2(2,4) = 35");
  c.expect(count(3, 1, 3) == 13, "G_F3(1,3) = 13");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 30.0, "point sweep under 30 seconds");
}

// 3. Global sections of G correspond bijectively to rank-k subsheaves of A^n,
// cross-checked against an unpruned product search.
void criterion_3(Check& c) {
  for (const Instance& inst : corpus()) {
    for (int q : {2, 3}) {
      const auto a = AlgebraSheaf::constant(inst.space, make_field(q));
      const OpenSet x = inst.space->whole();
      for (auto [k, n] : kRanks) {
        const std::string label = tag(inst, q, k, n);
        const GrassmannPresheaf g = build_grassmann_presheaf(a, k, n);
        const auto sections = enumerate_sections(g, x);
        const auto brute = oracle::brute_force_rank_k_subsheaves(g.ambient(), k);
        c.expect(sections.size() == brute.size(), label + " section count equals brute-force subsheaf count");
        std::vector<VectorSubsheaf> images;
        for (const GrassmannSection& s : sections) {
          images.push_back(section_to_subsheaf(s));
          c.expect(subsheaf_to_section(images.back(), k) == s, label + " section round-trip");
        }
        std::sort(images.begin(), images.end());
        c.expect(images == brute, label + " sections map onto the brute-force subsheaves");
        const Classification cl = classify(a, k, n);
        c.expect(cl.bijection && cl.round_trip, label + " classify bijection");
      }
    }
  }
}

// 4. G and V share minimal-open values and every V value restricts into G.
void criterion_4(Check& c) {
  for (const Instance& inst : corpus()) {
    for (int q : {2, 3}) {
      const auto a = AlgebraSheaf::constant(inst.space, make_field(q));
      for (auto [k, n] : kRanks) {
        const GrassmannPresheaf g = build_grassmann_presheaf(a, k, n);
        const GrassmannPresheaf v = build_v_presheaf(a, k, n);
        c.expect(check_lemma_2_2(g, v), tag(inst, q, k, n) + " lemma check");
        for (Point x = 0; x < inst.space->size(); ++x) {
          const OpenSet ux = inst.space->min_open(x);
          c.expect(g.values(ux) == v.values(ux), tag(inst, q, k, n) + " equal values on U_x");
        }
      }
    }
  }
}

/// Each nonempty open is connected as a subspace; checked by flood fill over
/// the specialization relation.
bool opens_connected(const FinSpace& s) {
  for (OpenSet u : s.opens()) {
    if (u.empty()) continue;
    const auto pts = u.points();
    std::vector<bool> seen(static_cast<std::size_t>(s.size()), false);
    std::vector<Point> stack{pts.front()};
    seen[static_cast<std::size_t>(pts.front())] = true;
    while (!stack.empty()) {
      const Point x = stack.back();
      stack.pop_back();
      for (Point y : pts) {
        if (!seen[static_cast<std::size_t>(y)] && (s.min_open(x).contains(y) || s.min_open(y).contains(x))) {
          seen[static_cast<std::size_t>(y)] = true;
          stack.push_back(y);
        }
      }
    }
    for (Point y : pts) {
      if (!seen[static_cast<std::size_t>(y)]) return false;
    }
  }
  return true;
}

bool sheafification_laws(const Presheaf& p, bool expect_complete, Check& c, const std::string& label) {
  const FinSpace& s = p.space();
  const SheafSpace sh = sheafify(p);
  bool bijective = true;
  for (OpenSet u : s.opens()) {
    if (!u.empty()) bijective = bijective && sh.unit_bijective(u);
  }
  c.expect(bijective == expect_complete, label + " unit bijectivity");
  c.expect(check_naturality(unit_morphism(sh)).empty(), label + " unit natural");
  const SheafSpace twice = sheafify(sh.sections());
  for (OpenSet u : s.opens()) c.expect(twice.unit_bijective(u), label + " idempotent");
  for (Point x = 0; x < s.size(); ++x) {
    const OpenSet ux = s.min_open(x);
    c.expect(sh.sections().carrier(ux).size == p.carrier(ux).size, label + " stalk sizes preserved");
    for (OpenSet u : s.opens()) {
      if (!u.contains(x)) continue;
      for (Element a = 0; a < p.carrier(u).size; ++a) {
        const Element lhs = sh.sections().restrict(u, ux, sh.unit(u)[static_cast<std::size_t>(a)]);
        const Element rhs = sh.unit(ux)[static_cast<std::size_t>(p.restrict(u, ux, a))];
        c.expect(lhs == rhs, label + " germs commute with the unit");
      }
    }
  }
  return bijective;
}

// 5. Sheafification: bijective unit exactly on complete presheaves,
// idempotence, stalks unchanged.
void criterion_5(Check& c) {
  for (const Instance& inst : corpus()) {
    for (int q : {2, 3}) {
      const std::string label = inst.label + "/F" + std::to_string(q);
      const Presheaf sheaf = constant_sheaf(inst.space, make_field(q));
      sheafification_laws(sheaf, true, c, label + " constant sheaf");
      const SheafSpace sh = sheafify(sheaf);
      for (OpenSet u : inst.space->opens()) c.expect(sh.unit_bijective(u), label + " unit bijective on every open");
      const Presheaf naive = constant_presheaf(inst.space, Carrier::of(make_field(q)));
      sheafification_laws(naive, opens_connected(*inst.space), c, label + " constant presheaf");
    }
  }
  const auto s = sierpinski_space();
  const Presheaf demo =
      two_algebra_presheaf(s, s->index_of("c"), make_quotient(2, {0, 0, 1}), make_field(2), {0, 1, 0, 1});
  sheafification_laws(demo, true, c, "two-algebra presheaf");
  const auto d2 = discrete_space({"x", "y"});
  const Presheaf nonsep = parse_presheaf(read_json_file(kData + "/non_separated.json"), d2);
  sheafification_laws(nonsep, false, c, "non-separated presheaf");
}

// 6. Every Grassmann presheaf is a monopresheaf; the non-separated example is not.
void criterion_6(Check& c) {
  for (const Instance& inst : corpus()) {
    for (int q : {2, 3}) {
      const auto a = AlgebraSheaf::constant(inst.space, make_field(q));
      for (auto [k, n] : kRanks) {
        const GrassmannPresheaf g = build_grassmann_presheaf(a, k, n);
        const GrassmannCheck chk = check_monopresheaf_not_complete(g);
        c.expect(chk.monopresheaf, tag(inst, q, k, n) + " monopresheaf");
        c.expect(oracle::separated_on_all_covers(g.as_presheaf()), tag(inst, q, k, n) + " separated on every cover");
      }
    }
  }
  const auto d2 = discrete_space({"x", "y"});
  const Presheaf nonsep = parse_presheaf(read_json_file(kData + "/non_separated.json"), d2);
  c.expect(!is_monopresheaf(nonsep), "non-separated presheaf rejected");
  c.expect(!oracle::separated_on_all_covers(nonsep), "oracle agrees on the non-separated presheaf");
}

// 7. Weight embeddings are monomorphisms landing among the classified
// subsheaves; the Moebius cover of the pseudo-circle admits no weights.
void criterion_7(Check& c) {
  for (const Instance& inst : corpus()) {
    for (int q : {2, 3}) {
      const auto a = AlgebraSheaf::constant(inst.space, make_field(q));
      const std::string label = inst.label + "/F" + std::to_string(q);
      // Free line on the cover {X} with alpha = 1.
      const TransitionCocycle whole{a, {inst.space->whole()}, 1, {}};
      const CocycleSheaf e = sheaf_from_cocycle(whole);
      const WeightSearch ws = search_weight_families(a, whole.cover);
      c.expect(!ws.valid.empty(), label + " cover {X} has weights");
      for (const WeightFamily& w : ws.valid) {
        const ModuleMorphism f = embed_via_weights(e.sheaf, whole.cover, e.trivializations, w);
        c.expect(is_monomorphism(f) && check_naturality(f).empty(), label + " {X} embedding mono");
      }
      const Classification cl = classify(a, 1, 2);
      for (const EmbeddingCheck& emb : cl.embeddings) {
        c.expect(emb.monomorphism && emb.found_among_subsheaves, label + " " + emb.label);
      }
    }
  }
  // Discrete singletons with indicator weights.
  const auto d2 = discrete_space({"x", "y"});
  for (int q : {2, 3}) {
    const auto a = AlgebraSheaf::constant(d2, make_field(q));
    const TransitionCocycle cov{a, {d2->min_open(0), d2->min_open(1)}, 1, {}};
    const CocycleSheaf e = sheaf_from_cocycle(cov);
    const WeightSearch ws = search_weight_families(a, cov.cover);
    c.expect(ws.valid.size() == static_cast<std::size_t>((q - 1) * (q - 1)), "discrete weights are unit indicators");
    for (const WeightFamily& w : ws.valid) {
      const ModuleMorphism f = embed_via_weights(e.sheaf, cov.cover, e.trivializations, w);
      c.expect(is_monomorphism(f) && check_naturality(f).empty(), "discrete embedding mono");
      const VectorSubsheaf img = image_subsheaf(f);
      const auto subs = enumerate_rank_k_subsheaves(f.target(), d2->whole(), 1);
      c.expect(std::find(subs.begin(), subs.end(), img) != subs.end(), "discrete image among rank-1 subsheaves");
    }
  }
  const auto pc = pseudo_circle();
  const auto a = AlgebraSheaf::constant(pc, make_field(3));
  const TransitionCocycle mob = parse_cocycle(read_json_file(kData + "/mobius_f3.json"), a);
  const WeightSearch none = search_weight_families(a, mob.cover);
  c.expect(none.valid.empty() && none.candidates == 9, "Moebius cover has no valid weights among 9 candidates");
}

// 8. The Moebius line bundle is locally free but not free, unlike the trivial cocycle.
void criterion_8(Check& c) {
  const auto pc = pseudo_circle();
  const auto a = AlgebraSheaf::constant(pc, make_field(3));
  const CocycleSheaf m = sheaf_from_cocycle(parse_cocycle(read_json_file(kData + "/mobius_f3.json"), a));
  const CocycleSheaf t = sheaf_from_cocycle(parse_cocycle(read_json_file(kData + "/trivial_f3.json"), a));
  const OpenSet x = pc->whole();
  c.expect(is_locally_free(full_subsheaf(m.sheaf, x), x, 1), "Moebius locally free");
  c.expect(!is_free_of_rank(full_subsheaf(m.sheaf, x), x, 1).free, "Moebius not free");
  c.expect(is_free_of_rank(full_subsheaf(t.sheaf, x), x, 1).free, "trivial cocycle free");
  c.expect(!find_module_isomorphism(m.sheaf, t.sheaf), "Moebius and trivial not isomorphic");
  c.expect(find_module_isomorphism(t.sheaf, free_sheaf(a, 1)).has_value(), "trivial isomorphic to A");
  c.expect(m.sheaf->sections(x).size() == 1, "Moebius has only the zero global section");
}

// 9. For N in {n, n+1, n+2}, level N embeds in level N+1 and the
// classification bijection holds at every level checked.
void criterion_9(Check& c) {
  struct Case {
    SpacePtr space;
    std::string label;
    int q, n;
  };
  std::vector<Case> cases;
  for (const auto& [sp, label] : {std::pair{point_space(), std::string("point")}, std::pair{sierpinski_space(), std::string("sierpinski")}}) {
    cases.push_back({sp, label, 2, 1});
    cases.push_back({sp, label, 2, 2});
    cases.push_back({sp, label, 3, 1});
  }
  for (const Case& cs : cases) {
    const auto a = AlgebraSheaf::constant(cs.space, make_field(cs.q));
    std::size_t previous = 0;
    for (int big_n = cs.n; big_n <= cs.n + 2; ++big_n) {
      const std::string label = cs.label + "/F" + std::to_string(cs.q) + "/n=" + std::to_string(cs.n) + ",N=" + std::to_string(big_n);
      const Classification cl = classify(a, cs.n, big_n);
      c.expect(cl.bijection && cl.round_trip, label + " bijection");
      c.expect(cl.sections > previous, label + " counts grow with N");
      previous = cl.sections;
      const TruncationStep step = check_truncation_step(a, cs.n, big_n);
      c.expect(step.embeds, label + " embeds into N+1");
      c.expect(step.count_n == cl.sections, label + " step count agrees");
      c.expect(step.count_next > step.count_n, label + " level N+1 is strictly larger");
    }
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"two-algebra counterexample", criterion_1},
      {"Grassmann counts over a point", criterion_2},
      {"sections <-> rank-k subsheaves", criterion_3},
      {"minimal-open values of G and V", criterion_4},
      {"sheafification laws", criterion_5},
      {"monopresheaf property", criterion_6},
      {"weight embeddings", criterion_7},
      {"Moebius bundle", criterion_8},
      {"truncation stability", criterion_9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const bool ok = c.failures.empty();
    std::printf("%s criterion %zu: %s (%.1f ms)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), ms);
    for (std::size_t f = 0; f < c.failures.size() && f < 10; ++f) std::printf("    %s\n", c.failures[f].c_str());
    if (!ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
