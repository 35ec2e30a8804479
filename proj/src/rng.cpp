#include "age/rng.hpp"

#include <algorithm>
#include <cmath>

namespace age {

double sample_beta_1_n(SeededRng& rng, double n) {
  if (!(n > 0.0)) throw UsageError("sample_beta_1_n: n must be positive");
  double u = rng.next_double();
  while (u == 0.0) u = rng.next_double();  // U on (0,1)
  return 1.0 - std::pow(u, 1.0 / n);
}

std::vector<int> sample_without_replacement(std::span<const int> pool, int k,
                                            SeededRng& rng) {
  if (k < 0 || static_cast<std::size_t>(k) > pool.size()) {
    throw UsageError("sample_without_replacement: k out of range");
  }
  std::vector<int> a(pool.begin(), pool.end());
  const auto n = static_cast<std::uint32_t>(a.size());
  for (int i = 0; i < k; ++i) {
    std::uint32_t j = i + rng.next_below(n - i);
    std::swap(a[i], a[j]);
  }
  a.resize(k);
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace age
