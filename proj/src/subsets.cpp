#include "hibreak/subsets.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "hibreak/errors.hpp"

namespace hibreak {

std::uint64_t binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t acc = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = n - k + i;
    if (acc > kMax / factor) return kMax;
    acc = acc * factor / i;
  }
  return acc;
}

bool next_combination(std::vector<std::size_t>& subset, std::size_t n) noexcept {
  const std::size_t k = subset.size();
  for (std::size_t i = k; i-- > 0;) {
    if (subset[i] < n - k + i) {
      ++subset[i];
      for (std::size_t j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::vector<std::size_t>> all_combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> s(k);
  std::iota(s.begin(), s.end(), std::size_t{0});
  out.reserve(static_cast<std::size_t>(binomial(n, k)));
  do {
    out.push_back(s);
  } while (next_combination(s, n));
  return out;
}

std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  if (k > n) throw Error(ErrorCode::InvalidArgument, "random_subset: k exceeds n");
  // Floyd's algorithm: k draws, no O(n) scratch.
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> smallest_indices(std::span<const double> values, std::size_t h) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  h = std::min(h, idx.size());
  auto less = [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h), idx.end(), less);
  idx.resize(h);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace hibreak
