#include "finsheaf/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace finsheaf {

namespace {

struct CommandInfo {
  Command command;
  const char* name;
};

constexpr CommandInfo kCommands[] = {
    {Command::SpaceCheck, "space-check"},   {Command::PresheafCheck, "presheaf-check"},
    {Command::Sheafify, "sheafify"},         {Command::Stalks, "stalks"},
    {Command::Pullback, "pullback"},         {Command::Grassmann, "grassmann"},
    {Command::Classify, "classify"},         {Command::Embed, "embed"},
    {Command::DemoCounterexample, "demo-counterexample"},
};

struct Outcome {
  Json report;
  std::string summary;
  int exit_code = kExitOk;
};

const std::string& require(const std::optional<std::string>& path, const char* flag) {
  if (!path) throw Error(ErrorKind::ValidationError, std::string("missing required flag ") + flag);
  return *path;
}

int require(const std::optional<int>& v, const char* flag) {
  if (!v) throw Error(ErrorKind::ValidationError, std::string("missing required flag ") + flag);
  return *v;
}

SpacePtr load_space(const RunConfig& c) { return parse_space(read_json_file(require(c.space, "--space"))); }

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::string instance_label(const RunConfig& c, const FinRing& r) {
  return stem(*c.space) + " / constant " + r.name();
}

/// The presheaf named by --presheaf, or the constant sheaf of --ring.
Presheaf load_presheaf(const RunConfig& c, const SpacePtr& space) {
  if (c.presheaf) return parse_presheaf(read_json_file(*c.presheaf), space);
  if (c.ring) return constant_sheaf(space, parse_ring(read_json_file(*c.ring)));
  throw Error(ErrorKind::ValidationError, "one of --presheaf or --ring is required");
}

AlgebraPtr load_algebra(const RunConfig& c, const SpacePtr& space) {
  return AlgebraSheaf::constant(space, parse_ring(read_json_file(require(c.ring, "--ring"))));
}

Json carriers_json(const Presheaf& p) {
  Json out = Json::object();
  for (OpenSet u : p.space().opens()) out[p.space().key(u)] = carrier_to_json(p.carrier(u));
  return out;
}

Json sizes_json(const Presheaf& p) {
  Json out = Json::object();
  for (OpenSet u : p.space().opens()) out[p.space().key(u)] = p.carrier(u).size;
  return out;
}

// ---------------------------------------------------------------------------

Outcome space_check(const RunConfig& c) {
  const SpacePtr s = load_space(c);
  Json opens = Json::array();
  for (OpenSet u : s->opens()) opens.push_back(open_to_json(*s, u));
  Json spec = Json::array();
  for (Point x = 0; x < s->size(); ++x) {
    for (Point y : s->min_open(x).points()) {
      if (y != x) spec.push_back(Json::array({s->name(x), s->name(y)}));
    }
  }
  Outcome o;
  o.report = {{"command", "space-check"}, {"space", space_to_json(*s)},  {"open_count", s->open_count()},
              {"opens", opens},           {"connected", is_connected(*s)}, {"specializations", spec}, {"t0", true}};
  o.summary = std::to_string(s->size()) + " points, " + std::to_string(s->open_count()) + " open sets, " +
              (is_connected(*s) ? "connected" : "disconnected");
  return o;
}

Outcome presheaf_check(const RunConfig& c) {
  const SpacePtr s = load_space(c);
  const Presheaf p = load_presheaf(c, s);
  const auto violations = validate(p);
  Outcome o;
  o.report = {{"command", "presheaf-check"}, {"carriers", carriers_json(p)}, {"valid", violations.empty()},
              {"violations", violations}, {"kind", std::string(to_string(p.uniform_kind()))}};
  if (!violations.empty()) {
    o.report["monopresheaf"] = nullptr;
    o.report["complete"] = nullptr;
    o.summary = "invalid presheaf: " + violations.front();
    o.exit_code = kExitInvalid;
    return o;
  }
  const bool mono = is_monopresheaf(p);
  const bool complete = mono && is_complete(p, c.budget);
  o.report["monopresheaf"] = mono;
  o.report["complete"] = complete;
  o.summary = std::string("valid presheaf; ") + (mono ? "separated" : "not separated") + ", " +
              (complete ? "complete" : "not complete");
  return o;
}

Outcome sheafify_command(const RunConfig& c) {
  const SpacePtr s = load_space(c);
  const Presheaf p = load_presheaf(c, s);
  if (auto v = validate(p); !v.empty()) throw Error(ErrorKind::ValidationError, v.front());
  const SheafSpace sh(p, c.budget);
  Json opens = Json::array();
  bool all = true, nonempty = true;
  for (OpenSet u : s->opens()) {
    const bool bij = sh.unit_bijective(u);
    all = all && bij;
    if (!u.empty()) nonempty = nonempty && bij;
    opens.push_back({{"open", open_to_json(*s, u)},
                     {"presheaf", p.carrier(u).size},
                     {"sheaf", sh.families(u).size()},
                     {"unit_injective", sh.unit_injective(u)},
                     {"unit_bijective", bij}});
  }
  // Idempotence: sheafifying the sheafification changes nothing.
  const SheafSpace twice(sh.sections(), c.budget);
  bool idempotent = true;
  for (OpenSet u : s->opens()) idempotent = idempotent && twice.unit_bijective(u);
  const std::string conclusion = all        ? "unit bijective on all opens"
                                 : nonempty ? "unit bijective on all nonempty opens"
                                            : "unit not bijective; the presheaf is not complete";
  Outcome o;
  o.report = {{"command", "sheafify"},
              {"opens", opens},
              {"sheaf_carriers", carriers_json(sh.sections())},
              {"idempotent", idempotent},
              {"conclusion", conclusion}};
  o.summary = conclusion;
  return o;
}

Outcome stalks_command(const RunConfig& c) {
  const SpacePtr s = load_space(c);
  const Presheaf p = load_presheaf(c, s);
  if (auto v = validate(p); !v.empty()) throw Error(ErrorKind::ValidationError, v.front());
  const auto st = StalkSystem::of(p);
  Json stalks = Json::object(), maps = Json::array();
  for (Point x = 0; x < s->size(); ++x) {
    stalks[s->name(x)] = carrier_to_json(st.carrier(x));
    for (Point y : s->min_open(x).points()) {
      if (y != x) maps.push_back({{"from", s->name(x)}, {"to", s->name(y)}, {"map", st.map(x, y)}});
    }
  }
  Outcome o;
  o.report = {{"command", "stalks"}, {"stalks", stalks}, {"specializations", maps}};
  std::ostringstream sum;
  for (Point x = 0; x < s->size(); ++x) sum << (x ? ", " : "") << s->name(x) << ": " << st.carrier(x).size;
  o.summary = "stalk sizes " + sum.str();
  return o;
}

Outcome pullback_command(const RunConfig& c) {
  const SpacePtr s = load_space(c);
  const Presheaf p = load_presheaf(c, s);
  if (auto v = validate(p); !v.empty()) throw Error(ErrorKind::ValidationError, v.front());
  const ContinuousMap f = parse_map(read_json_file(require(c.map, "--map")), s);
  const Presheaf q = pullback(p, f, c.budget);
  Json assignment = Json::object(), stalks = Json::object();
  for (Point y = 0; y < f.domain().size(); ++y) {
    assignment[f.domain().name(y)] = s->name(f(y));
    stalks[f.domain().name(y)] = q.carrier(f.domain().min_open(y)).size;
  }
  Outcome o;
  o.report = {{"command", "pullback"},          {"domain", space_to_json(f.domain())}, {"assignment", assignment},
              {"stalks", stalks},               {"carriers", carriers_json(q)}};
  o.summary = "pullback over " + std::to_string(f.domain().size()) + " points, global sections " +
              std::to_string(q.carrier(f.domain().whole()).size);
  return o;
}

Json classification_json(const Classification& cl, bool with_embeddings) {
  Json pairs = Json::array();
  for (auto [i, j] : cl.pairs) pairs.push_back({{"section", i}, {"subsheaf", j}});
  Json subs = Json::array();
  for (const auto& t : cl.subsheaf_list) subs.push_back(subsheaf_to_json(t));
  Json out{{"counts", {{"sections", cl.sections}, {"subsheaves", cl.subsheaves}}},
           {"bijection", pairs},
           {"bijection_verified", cl.bijection},
           {"round_trip", cl.round_trip},
           {"subsheaves", subs}};
  if (with_embeddings) {
    Json emb = Json::array();
    for (const auto& e : cl.embeddings) {
      emb.push_back({{"label", e.label},
                     {"cover_size", e.cover_size},
                     {"monomorphism", e.monomorphism},
                     {"found_among_subsheaves", e.found_among_subsheaves}});
    }
    out["embeddings"] = emb;
  }
  return out;
}

Json witness_json(const GrassmannCheck& chk, const FinSpace& s) {
  if (!chk.witness) return nullptr;
  return {{"open", open_to_json(s, chk.witness->open)}, {"stalks", subsheaf_to_json(chk.witness->glued)}};
}

Outcome grassmann_command(const RunConfig& c) {
  const int k = require(c.k, "-k"), n = require(c.n, "-n");
  const SpacePtr s = load_space(c);
  const AlgebraPtr a = load_algebra(c, s);
  const GrassmannPresheaf g = build_grassmann_presheaf(a, k, n, c.budget);
  const GrassmannPresheaf v = build_v_presheaf(a, k, n, c.budget);
  const GrassmannCheck chk = check_monopresheaf_not_complete(g, c.budget);
  const Classification cl = classify(a, k, n, c.budget);
  Json values = Json::object();
  for (OpenSet u : s->opens()) values[s->key(u)] = g.values(u).size();
  Json report = classification_json(cl, false);
  report["counts"]["values"] = values;
  report.update({{"command", "grassmann"},
                 {"instance", instance_label(c, *a->stalk(0))},
                 {"k", k},
                 {"n", n},
                 {"N", nullptr},
                 {"monopresheaf", chk.monopresheaf},
                 {"complete", chk.complete},
                 {"completeness_witness", witness_json(chk, *s)},
                 {"completeness_conclusion", chk.witness ? "non-free gluing found" : "complete at this scale"},
                 {"lemma_2_2", check_lemma_2_2(g, v)}});
  Outcome o;
  o.report = std::move(report);
  o.summary = std::to_string(cl.sections) + " sections, " + std::to_string(cl.subsheaves) + " subsheaves, bijection " +
              (cl.bijection ? "verified" : "FAILED") + ", monopresheaf " + (chk.monopresheaf ? "true" : "false");
  if (!cl.bijection || !cl.round_trip) o.exit_code = kExitInvalid;
  return o;
}

Outcome classify_command(const RunConfig& c) {
  const int n = require(c.n, "-n"), big_n = require(c.N, "-N");
  const SpacePtr s = load_space(c);
  const AlgebraPtr a = load_algebra(c, s);
  const Classification cl = classify(a, n, big_n, c.budget);
  const GrassmannPresheaf g = build_universal_grassmann(a, n, big_n, c.budget);
  const GrassmannCheck chk = check_monopresheaf_not_complete(g, c.budget);
  Json report = classification_json(cl, true);
  report.update({{"command", "classify"},
                 {"instance", instance_label(c, *a->stalk(0))},
                 {"k", n},
                 {"n", n},
                 {"N", big_n},
                 {"monopresheaf", chk.monopresheaf},
                 {"completeness_witness", witness_json(chk, *s)}});
  Outcome o;
  o.report = std::move(report);
  bool embeddings_ok = true;
  for (const auto& e : cl.embeddings) embeddings_ok = embeddings_ok && e.monomorphism && e.found_among_subsheaves;
  o.summary = std::to_string(cl.sections) + " global sections <-> " + std::to_string(cl.subsheaves) +
              " rank-" + std::to_string(n) + " subsheaves of A^" + std::to_string(big_n) +
              (cl.bijection ? ", bijection verified" : ", bijection FAILED");
  if (!cl.bijection || !cl.round_trip || !embeddings_ok) o.exit_code = kExitInvalid;
  return o;
}

Outcome embed_command(const RunConfig& c) {
  const SpacePtr s = load_space(c);
  const AlgebraPtr a = load_algebra(c, s);
  const TransitionCocycle cocycle = parse_cocycle(read_json_file(require(c.cocycle, "--cocycle")), a);
  const CocycleSheaf cs = sheaf_from_cocycle(cocycle);
  const int k = cocycle.rank;
  const int m = static_cast<int>(cocycle.cover.size());

  bool trivializations_ok = true;
  for (const auto& psi : cs.trivializations) trivializations_ok = trivializations_ok && is_isomorphism(psi) && check_naturality(psi).empty();
  const bool free = find_module_isomorphism(cs.sheaf, free_sheaf(a, k), c.budget).has_value();

  Json cover = Json::array();
  for (OpenSet u : cocycle.cover) cover.push_back(open_to_json(*s, u));
  Json report{{"command", "embed"},
              {"instance", instance_label(c, *a->stalk(0))},
              {"cover", cover},
              {"rank", k},
              {"locally_free", trivializations_ok},
              {"free", free}};

  std::optional<WeightFamily> weights;
  if (c.weights) {
    weights = parse_weights(read_json_file(*c.weights), a, cocycle.cover);
    const auto problems = validate_weights(*weights);
    report["weights"] = {{"source", "file"}, {"violations", problems}, {"values", weights->weights}};
    if (!problems.empty()) weights.reset();
  } else {
    const WeightSearch search = search_weight_families(a, cocycle.cover, c.budget);
    report["weights"] = {{"source", "search"},
                         {"candidates", search.candidates},
                         {"valid", search.valid.size()},
                         {"values", search.valid.empty() ? Json(nullptr) : Json(search.valid.front().weights)}};
    if (!search.valid.empty()) weights = search.valid.front();
  }

  Outcome o;
  if (!weights) {
    report["embedding"] = nullptr;
    report["conclusion"] = "no valid weight family on this cover; embedding not constructed";
    o.summary = report["conclusion"];
    o.exit_code = c.weights ? kExitInvalid : kExitOk;
  } else {
    const ModuleMorphism f = embed_via_weights(cs.sheaf, cocycle.cover, cs.trivializations, *weights);
    const bool mono = is_monomorphism(f);
    const bool natural = check_naturality(f).empty();
    Json comps = Json::object();
    for (Point x = 0; x < s->size(); ++x) comps[s->name(x)] = matrix_to_json(f.component(x));
    report["embedding"] = {{"target_rank", k * m}, {"monomorphism", mono}, {"natural", natural}, {"components", comps}};
    report["conclusion"] = mono && natural ? "embeds into the free sheaf of rank " + std::to_string(k * m)
                                           : "weight map is not a monomorphism";
    o.summary = report["conclusion"];
    if (!mono || !natural) o.exit_code = kExitInvalid;
  }
  o.report = std::move(report);
  return o;
}

Outcome demo_command(const RunConfig& c) {
  std::optional<AlgebraPair> algebras;
  if (c.algebras) algebras = parse_algebras(read_json_file(*c.algebras));
  Outcome o;
  o.report = demo_counterexample(algebras, c.budget);
  o.summary = o.report["conclusion"];
  return o;
}

Outcome dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::SpaceCheck: return space_check(c);
    case Command::PresheafCheck: return presheaf_check(c);
    case Command::Sheafify: return sheafify_command(c);
    case Command::Stalks: return stalks_command(c);
    case Command::Pullback: return pullback_command(c);
    case Command::Grassmann: return grassmann_command(c);
    case Command::Classify: return classify_command(c);
    case Command::Embed: return embed_command(c);
    case Command::DemoCounterexample: return demo_command(c);
  }
  throw Error(ErrorKind::ValidationError, "unknown command");
}

void validate_config(const RunConfig& c) {
  for (const auto* v : {&c.k, &c.n, &c.N}) {
    if (*v && **v < 0) throw Error(ErrorKind::ValidationError, "ranks must be nonnegative");
  }
  if (c.k && c.n && *c.k > *c.n) throw Error(ErrorKind::ValidationError, "need k <= n");
  if (c.n && c.N && *c.n > *c.N) throw Error(ErrorKind::ValidationError, "need n <= N");
  if (c.budget == 0) throw Error(ErrorKind::ValidationError, "budget must be positive");
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& info : kCommands) {
    if (info.command == c) return info.name;
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& info : kCommands) {
    if (name == info.name) return info.command;
  }
  return std::nullopt;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& info : kCommands) v.emplace_back(info.name);
    return v;
  }();
  return names;
}

Json demo_counterexample(const std::optional<AlgebraPair>& algebras, std::size_t budget) {
  const SpacePtr s = sierpinski_space();
  const Point x0 = s->index_of("c"), x1 = s->index_of("o");
  AlgebraPair alg;
  if (algebras) {
    alg = *algebras;
  } else {
    alg.a0 = make_quotient(2, {0, 0, 1});
    alg.a1 = make_field(2);
    alg.rho = {0, 1, 0, 1};  // c0 + c1 t |-> c0
  }
  const Presheaf p = two_algebra_presheaf(s, x0, alg.a0, alg.a1, alg.rho);
  const SheafSpace sh(p, budget);
  const Presheaf& sheaf = sh.sections();
  const RingPtr stalk0 = sheaf.carrier(s->min_open(x0)).ring;
  const RingPtr stalk1 = sheaf.carrier(s->min_open(x1)).ring;
  const auto iso = find_ring_isomorphism(stalk0, stalk1);

  const SpacePtr pt = point_space("*");
  const Presheaf pull0 = pullback(sheaf, ContinuousMap::constant(pt, s, x0), budget);
  const Presheaf pull1 = pullback(sheaf, ContinuousMap::constant(pt, s, x1), budget);
  const RingPtr g0 = pull0.carrier(pt->whole()).ring;
  const RingPtr g1 = pull1.carrier(pt->whole()).ring;
  const bool pullbacks_iso = find_ring_isomorphism(g0, g1).has_value();

  bool unit_ok = true;
  for (OpenSet u : s->opens()) unit_ok = unit_ok && (u.empty() || sh.unit_bijective(u));

  Json stalks = Json::object();
  stalks[s->name(x0)] = stalk0->size();
  stalks[s->name(x1)] = stalk1->size();
  const bool degenerate = iso.has_value();
  const std::string conclusion =
      degenerate ? "degenerate case: the stalks are isomorphic, so the two pull-backs agree"
                 : "homotopic maps do not yield isomorphic pull-backs: the constant maps at " + s->name(x0) + " and " +
                       s->name(x1) + " are homotopic but pull the sheaf back to non-isomorphic rings";
  return Json{{"command", "demo-counterexample"},
              {"space", space_to_json(*s)},
              {"x0", s->name(x0)},
              {"x1", s->name(x1)},
              {"a0", ring_to_json(*alg.a0)},
              {"a1", ring_to_json(*alg.a1)},
              {"rho", alg.rho},
              {"presheaf_carriers", sizes_json(p)},
              {"sheaf_carriers", sizes_json(sheaf)},
              {"unit_bijective_on_nonempty_opens", unit_ok},
              {"stalk_sizes", stalks},
              {"stalk_isomorphism", {{"exists", iso.has_value()}, {"search", "exhaustive"}}},
              {"pullbacks",
               {{"constant_at_x0", {{"global_sections", g0->size()}, {"ring", g0->name()}}},
                {"constant_at_x1", {{"global_sections", g1->size()}, {"ring", g1->name()}}},
                {"isomorphic", pullbacks_iso}}},
              {"constant_maps_homotopic", true},
              {"degenerate", degenerate},
              {"conclusion", conclusion}};
}

RunResult execute(const RunConfig& config) {
  RunResult r;
  auto error_report = [&](const std::string& kind, const std::string& message) {
    return Json{{"command", std::string(to_string(config.command))}, {"error", {{"kind", kind}, {"message", message}}}};
  };
  try {
    validate_config(config);
    Outcome o = dispatch(config);
    r.exit_code = o.exit_code;
    r.report = std::move(o.report);
    r.summary = std::move(o.summary);
  } catch (const Error& e) {
    r.summary = e.what();
    if (e.kind() == ErrorKind::ParseError) {
      r.exit_code = kExitInvalid;
    } else {
      r.exit_code = e.is_budget() ? kExitBudget : kExitInvalid;
      r.report = error_report(std::string(to_string(e.kind())), e.what());
    }
  } catch (const std::exception& e) {
    r.exit_code = kExitInvalid;
    r.summary = std::string("error: ") + e.what();
    r.report = error_report("ValidationError", e.what());
  }
  return r;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const RunResult r = execute(config);
  if (r.report) {
    const std::string text = r.report->dump(2) + "\n";
    if (config.out) {
      std::ofstream f(*config.out, std::ios::binary);
      if (!f) {
        err << "cannot write " << *config.out << "\n";
        return kExitInvalid;
      }
      f << text;
    } else {
      out << text;
    }
  }
  err << r.summary << "\n";
  return r.exit_code;
}

}  // namespace finsheaf
