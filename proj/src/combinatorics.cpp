#include "ssrkit/combinatorics.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numeric>
#include <thread>

namespace ssr::detail {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / num)
      return std::numeric_limits<std::uint64_t>::max();
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

std::uint64_t comb_rank(const std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  std::uint64_t rank = 0;
  int prev = -1;
  for (int i = 0; i < k; ++i) {
    for (int v = prev + 1; v < c[i]; ++v) rank += binomial(n - 1 - v, k - 1 - i);
    prev = c[i];
  }
  return rank;
}

std::vector<int> comb_unrank(std::uint64_t rank, int n, int k) {
  std::vector<int> c(k);
  int v = 0;
  for (int i = 0; i < k; ++i) {
    while (true) {
      const std::uint64_t block = binomial(n - 1 - v, k - 1 - i);
      if (rank < block) break;
      rank -= block;
      ++v;
    }
    c[i] = v++;
  }
  return c;
}

bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

namespace {

// Sequential scan of lex positions [lo, hi); stops early once some thread has
// found a hit at a position not after ours.
void scan_range(int n, int k, std::uint64_t lo, std::uint64_t hi,
                const std::function<bool(const std::vector<int>&)>& pred,
                std::atomic<std::uint64_t>& best) {
  if (lo >= hi) return;
  std::vector<int> c = comb_unrank(lo, n, k);
  for (std::uint64_t pos = lo; pos < hi; ++pos) {
    if (best.load(std::memory_order_relaxed) <= pos) return;
    if (pred(c)) {
      std::uint64_t cur = best.load(std::memory_order_relaxed);
      while (pos < cur && !best.compare_exchange_weak(cur, pos, std::memory_order_relaxed)) {
      }
      return;
    }
    if (!next_combination(c, n)) return;
  }
}

}  // namespace

ScanResult scan_combinations(int n, int k, std::uint64_t budget, int threads,
                             const std::function<bool(const std::vector<int>&)>& pred) {
  ScanResult out;
  const std::uint64_t total = binomial(n, k);
  const std::uint64_t limit = std::min(total, budget);
  out.truncated = limit < total;
  if (limit == 0) return out;

  if (threads <= 1 || limit < 1024) {
    std::vector<int> c(k);
    std::iota(c.begin(), c.end(), 0);
    for (std::uint64_t pos = 0; pos < limit; ++pos) {
      if (pred(c)) {
        out.hit = c;
        out.charged = pos + 1;
        return out;
      }
      if (!next_combination(c, n)) break;
    }
    out.charged = limit;
    return out;
  }

  const int workers = std::min<std::uint64_t>(threads, limit);
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = (limit + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t lo = chunk * w;
    const std::uint64_t hi = std::min(limit, lo + chunk);
    pool.emplace_back(scan_range, n, k, lo, hi, std::cref(pred), std::ref(best));
  }
  for (auto& t : pool) t.join();

  const std::uint64_t found = best.load();
  if (found != std::numeric_limits<std::uint64_t>::max()) {
    out.hit = comb_unrank(found, n, k);
    out.charged = found + 1;
  } else {
    out.charged = limit;
  }
  return out;
}

}  // namespace ssr::detail
