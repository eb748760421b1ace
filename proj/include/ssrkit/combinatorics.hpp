#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ssr::detail {

/// Binomial coefficient, saturating at UINT64_MAX on overflow.
std::uint64_t binomial(int n, int k);

/// Position of a strictly increasing k-subset of {0..n-1} in lexicographic order.
std::uint64_t comb_rank(const std::vector<int>& c, int n);

/// Inverse of comb_rank.
std::vector<int> comb_unrank(std::uint64_t rank, int n, int k);

/// Advance a k-subset to its lexicographic successor; false at the last one.
bool next_combination(std::vector<int>& c, int n);

struct ScanResult {
  /// Lexicographically first subset the predicate accepted, if any.
  std::optional<std::vector<int>> hit;
  /// Subsets charged against the budget: the lex position of the hit plus one,
  /// or the number of in-budget subsets when nothing was accepted.
  std::uint64_t charged = 0;
  /// True when the in-budget prefix did not cover the whole cardinality.
  bool truncated = false;
};

/// Scan the k-subsets of {0..n-1} in lexicographic order, at most `budget` of
/// them, and report the first subset `pred` accepts.  With threads > 1 the
/// range is split into contiguous chunks scanned concurrently; the result and
/// the charge are the same as in the sequential scan.  `pred` must be safe to
/// call from multiple threads.
ScanResult scan_combinations(int n, int k, std::uint64_t budget, int threads,
                             const std::function<bool(const std::vector<int>&)>& pred);

}  // namespace ssr::detail
