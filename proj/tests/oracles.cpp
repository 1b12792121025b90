#include "oracles.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace oracle {

using namespace finsheaf;

std::uint64_t gaussian_binomial(int q, int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    std::uint64_t a = 1, b = 1;
    for (int e = 0; e < n - i; ++e) a *= static_cast<std::uint64_t>(q);
    for (int e = 0; e < i + 1; ++e) b *= static_cast<std::uint64_t>(q);
    num *= a - 1;
    den *= b - 1;
  }
  return num / den;
}

std::size_t brute_force_subspace_count(int q, int n, int k) {
  int total = 1;
  for (int i = 0; i < n; ++i) total *= q;
  auto digits = [&](int code) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
      v[static_cast<std::size_t>(i)] = code % q;
      code /= q;
    }
    return v;
  };
  auto code_of = [&](const std::vector<int>& v) {
    int c = 0;
    for (int d : v) c = c * q + d;
    return c;
  };
  int expected = 1;
  for (int i = 0; i < k; ++i) expected *= q;

  std::set<std::vector<int>> spans;
  std::vector<int> pick(static_cast<std::size_t>(k), 0);
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == k) {
      std::set<int> span;
      int combos = 1;
      for (int i = 0; i < k; ++i) combos *= q;
      for (int c = 0; c < combos; ++c) {
        std::vector<int> acc(static_cast<std::size_t>(n), 0);
        int rest = c;
        for (int i = 0; i < k; ++i) {
          const int coeff = rest % q;
          rest /= q;
          const auto v = digits(pick[static_cast<std::size_t>(i)]);
          for (int j = 0; j < n; ++j) {
            acc[static_cast<std::size_t>(j)] = (acc[static_cast<std::size_t>(j)] + coeff * v[static_cast<std::size_t>(j)]) % q;
          }
        }
        span.insert(code_of(acc));
      }
      if (static_cast<int>(span.size()) == expected) spans.insert(std::vector<int>(span.begin(), span.end()));
      return;
    }
    const int from = depth == 0 ? 0 : pick[static_cast<std::size_t>(depth - 1)] + 1;
    for (int v = from; v < total; ++v) {
      pick[static_cast<std::size_t>(depth)] = v;
      self(self, depth + 1);
    }
  };
  recurse(recurse, 0);
  return spans.size();
}

Element permutation_det(const Matrix& m) {
  const FinRing& r = *m.ring();
  std::vector<int> perm(static_cast<std::size_t>(m.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  Element total = r.zero();
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      for (std::size_t j = i + 1; j < perm.size(); ++j) inversions += perm[i] > perm[j];
    }
    Element term = r.one();
    for (int i = 0; i < m.rows(); ++i) term = r.mul(term, m.at(i, perm[static_cast<std::size_t>(i)]));
    total = inversions % 2 ? r.sub(total, term) : r.add(total, term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

std::optional<Matrix> brute_force_inverse(const Matrix& m) {
  SearchBudget budget(10'000'000);
  const Matrix id = Matrix::identity(m.ring(), m.rows());
  for (const Matrix& c : all_matrices(m.ring(), m.rows(), m.cols(), budget)) {
    if (m * c == id && c * m == id) return c;
  }
  return std::nullopt;
}

bool separated_on_all_covers(const Presheaf& p) {
  const FinSpace& s = p.space();
  for (OpenSet u : s.opens()) {
    if (u.empty()) continue;
    std::vector<OpenSet> inside;
    for (OpenSet v : s.opens()) {
      if (!v.empty() && v.subset_of(u)) inside.push_back(v);
    }
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << inside.size()); ++mask) {
      OpenSet covered;
      std::vector<OpenSet> cover;
      for (std::size_t i = 0; i < inside.size(); ++i) {
        if (mask >> i & 1U) {
          cover.push_back(inside[i]);
          covered = covered | inside[i];
        }
      }
      if (covered != u) continue;
      std::set<std::vector<Element>> images;
      for (Element a = 0; a < p.carrier(u).size; ++a) {
        std::vector<Element> img;
        for (OpenSet v : cover) img.push_back(p.restrict(u, v, a));
        if (!images.insert(img).second) return false;
      }
    }
  }
  return true;
}

std::vector<VectorSubsheaf> brute_force_rank_k_subsheaves(const ModuleSheafPtr& ambient, int k) {
  const FinSpace& s = ambient->space();
  std::vector<std::vector<Submodule>> choices;
  for (Point x = 0; x < s.size(); ++x) {
    choices.push_back(enumerate_free_submodules(ambient->base().stalk(x), ambient->rank(x), k));
  }
  std::vector<VectorSubsheaf> out;
  std::vector<std::size_t> idx(choices.size(), 0);
  while (true) {
    std::vector<Submodule> stalks;
    for (std::size_t i = 0; i < choices.size(); ++i) stalks.push_back(choices[i][idx[i]]);
    VectorSubsheaf t(ambient, s.whole(), std::move(stalks));
    if (validate_subsheaf(t).empty() && is_locally_free(t, s.whole(), k)) out.push_back(std::move(t));
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == choices[i].size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
