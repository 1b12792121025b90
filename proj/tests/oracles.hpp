#pragma once

// Reference computations used to cross-check the library. Each one is a
// deliberately naive, independent route to the same answer.

#include <cstdint>
#include <optional>
#include <vector>

#include "finsheaf/grassmann.hpp"

namespace oracle {

/// [n choose k]_q from the product formula.
std::uint64_t gaussian_binomial(int q, int n, int k);

/// Distinct spans of q^k elements among all k-tuples of vectors in F_q^n,
/// computed with plain modular arithmetic.
std::size_t brute_force_subspace_count(int q, int n, int k);

/// Leibniz formula: sum over permutations of sign * product.
finsheaf::Element permutation_det(const finsheaf::Matrix& m);

/// Scans every matrix of the same shape for a two-sided inverse.
std::optional<finsheaf::Matrix> brute_force_inverse(const finsheaf::Matrix& m);

/// Separation checked literally: for every nonempty open U and every family
/// of opens covering U, sections of U are determined by their restrictions.
bool separated_on_all_covers(const finsheaf::Presheaf& p);

/// Every choice of one rank-k stalk subspace per point, kept when it is a
/// valid subsheaf that is locally free of rank k. No pruning.
std::vector<finsheaf::VectorSubsheaf> brute_force_rank_k_subsheaves(const finsheaf::ModuleSheafPtr& ambient, int k);

}  // namespace oracle
