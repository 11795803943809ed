#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace hibreak {

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k) noexcept;

/// Advances `subset` (sorted, values in [0, n)) to its lexicographic
/// successor. Returns false after the last combination.
bool next_combination(std::vector<std::size_t>& subset, std::size_t n) noexcept;

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> all_combinations(std::size_t n, std::size_t k);

/// Uniform k-subset of {0..n-1}, returned sorted.
std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t n, std::size_t k);

/// Indices of the h smallest values, ties broken by lowest index, returned
/// in ascending index order.
std::vector<std::size_t> smallest_indices(std::span<const double> values, std::size_t h);

}  // namespace hibreak
