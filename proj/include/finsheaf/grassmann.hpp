#pragma once

// Grassmann presheaves of free and locally free rank-k subsheaves of A^n, the
// sheaf they generate, and the section <-> subsheaf classification.
//
// Values are stored extensionally: G(U) is an explicit sorted list of
// VectorSubsheaf objects over U, and restriction is the literal stalk-family
// restriction. The Set-tagged presheaf view lets the generic separation and
// sheafification code run on it unchanged.

#include <optional>
#include <string>
#include <vector>

#include "finsheaf/vecsheaf.hpp"

namespace finsheaf {

enum class GrassmannKind { Free, LocallyFree };

class GrassmannPresheaf {
 public:
  /// Values are the rank-k subsheaves of A^n over each open that are free
  /// (kind Free) or locally free (kind LocallyFree). Throws NotAField when a
  /// stalk ring is not a field, SearchBudgetExceeded when the scan runs out.
  GrassmannPresheaf(AlgebraPtr base, int k, int n, GrassmannKind kind, std::size_t budget = kDefaultBudget);

  const AlgebraSheaf& base() const { return ambient_->base(); }
  const AlgebraPtr& base_ptr() const { return ambient_->base_ptr(); }
  const FinSpace& space() const { return ambient_->space(); }
  const ModuleSheafPtr& ambient() const { return ambient_; }
  int k() const { return k_; }
  int n() const { return n_; }
  GrassmannKind kind() const { return kind_; }

  const std::vector<VectorSubsheaf>& values(OpenSet u) const {
    return values_[static_cast<std::size_t>(space().open_index(u))];
  }
  std::optional<std::size_t> index_of(OpenSet u, const VectorSubsheaf& s) const;

  /// Set-tagged view: carrier(U) indexes values(U).
  const Presheaf& as_presheaf() const { return *presheaf_; }

 private:
  ModuleSheafPtr ambient_;
  int k_, n_;
  GrassmannKind kind_;
  std::vector<std::vector<VectorSubsheaf>> values_;
  std::shared_ptr<const Presheaf> presheaf_;
};

GrassmannPresheaf build_grassmann_presheaf(const AlgebraPtr& a, int k, int n, std::size_t budget = kDefaultBudget);
/// V_A(k,n). Throws InvalidPresheaf if the result fails the completeness check.
GrassmannPresheaf build_v_presheaf(const AlgebraPtr& a, int k, int n, std::size_t budget = kDefaultBudget);
/// The rank-n Grassmann presheaf of A^N, standing in for A^infinity.
GrassmannPresheaf build_universal_grassmann(const AlgebraPtr& a, int n, int truncation,
                                            std::size_t budget = kDefaultBudget);

/// Valid subsheaves of `ambient` over U whose stalks all have |A_x|^k
/// elements, found by backtracking over stalk subspaces with closure pruning.
std::vector<VectorSubsheaf> enumerate_dimension_k_families(const ModuleSheafPtr& ambient, OpenSet u, int k,
                                                           SearchBudget& budget);

/// Rank-k vector subsheaves of A^n over U (locally free of rank k), sorted.
std::vector<VectorSubsheaf> enumerate_rank_k_subsheaves(const ModuleSheafPtr& ambient, OpenSet u, int k,
                                                        std::size_t budget = kDefaultBudget);

struct CompletenessWitness {
  OpenSet open;
  /// A compatible family over `open` that glues to a locally free, non-free subsheaf.
  VectorSubsheaf glued;
};

struct GrassmannCheck {
  bool monopresheaf = false;
  bool complete = false;
  std::optional<CompletenessWitness> witness;
  /// Opens where the family count was compared against the value count.
  std::size_t opens_checked = 0;
};

GrassmannCheck check_monopresheaf_not_complete(const GrassmannPresheaf& g, std::size_t budget = kDefaultBudget);

/// Germ sets of g and v agree at every point, and every value of v restricts
/// into g on each minimal open of its domain.
bool check_lemma_2_2(const GrassmannPresheaf& g, const GrassmannPresheaf& v);

/// A compatible choice of free rank-k subsheaves over the minimal opens of U.
struct GrassmannSection {
  ModuleSheafPtr ambient;
  OpenSet domain;
  /// Indexed by point; only points of `domain` carry a value.
  std::vector<std::optional<VectorSubsheaf>> family;

  const VectorSubsheaf& at(Point x) const { return *family[static_cast<std::size_t>(x)]; }
  friend bool operator==(const GrassmannSection& a, const GrassmannSection& b) {
    return a.domain == b.domain && a.family == b.family;
  }
};

std::vector<GrassmannSection> enumerate_sections(const GrassmannPresheaf& g, OpenSet u,
                                                 std::size_t budget = kDefaultBudget);

/// Restriction of a section to a smaller open.
GrassmannSection restrict_section(const GrassmannSection& s, OpenSet v);

VectorSubsheaf section_to_subsheaf(const GrassmannSection& s);
/// Throws NotLocallyFree unless t is free of rank k on every minimal open of its domain.
GrassmannSection subsheaf_to_section(const VectorSubsheaf& t, int k, std::size_t budget = kDefaultBudget);

struct EmbeddingCheck {
  std::string label;
  /// Cover size m; the target is A^{n m} padded to A^N.
  int cover_size = 0;
  bool monomorphism = false;
  bool found_among_subsheaves = false;
};

struct Classification {
  int n = 0, truncation = 0;
  std::size_t sections = 0, subsheaves = 0;
  /// (section index, subsheaf index) in enumeration order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  bool bijection = false;
  bool round_trip = false;
  std::vector<VectorSubsheaf> subsheaf_list;
  std::vector<EmbeddingCheck> embeddings;
};

/// Pairs global sections of the truncated universal Grassmann sheaf with the
/// rank-n vector subsheaves of A^N, and checks weight embeddings land among them.
Classification classify(const AlgebraPtr& a, int n, int truncation, std::size_t budget = kDefaultBudget);

struct TruncationStep {
  std::size_t count_n = 0, count_next = 0;
  /// Padding by a zero coordinate maps level N injectively into level N+1.
  bool embeds = false;
};

TruncationStep check_truncation_step(const AlgebraPtr& a, int n, int truncation, std::size_t budget = kDefaultBudget);

}  // namespace finsheaf
