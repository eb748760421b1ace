#pragma once

#include "ssrkit/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ssr::bench {

/// One benchmark cell.  Families:
///  "slope"   r = n/2 rotation blocks with angles spread over the unit
///            circle; keeps every horizon map well conditioned at large n so
///            the monolithic reference solve stays meaningful.  All blocks
///            vote, so the decomposed subset count is zero.
///  "count"   r Jordan blocks of size n/r with separated real eigenvalues;
///            every eigenvalue is seen by all sensors, so the decomposed
///            path votes while the monolithic search pays the full subset
///            scan.
///  "single"  A = I_n: one eigenvalue spanning the whole state, so the
///            decomposition degenerates to a single block and both paths
///            examine exactly the same subsets.
/// Sensors are always scalar rows with entries uniform in [0.5, 1.5].
struct CellSpec {
  std::string family;
  int n = 0;  // state dimension
  int r = 0;  // distinct eigenvalues
  int N = 0;  // sensors
  int s = 0;  // attack budget
  std::uint64_t seed = 0;
  int reps = 3;  // timing repetitions; the minimum is kept
};

struct CellResult {
  CellSpec spec;
  double t_decompose = 0.0;         // eigenstructure + projectors + restriction, seconds
  double t_solve_decomposed = 0.0;  // per-eigenvalue solve, seconds
  double t_solve_monolithic = 0.0;  // brute-force reference, seconds
  std::uint64_t sets_decomposed = 0;
  std::uint64_t sets_monolithic = 0;
  bool agree = false;     // states within 1e-6 and identical attack sets
  bool timed_out = false;
};

LtiSystem make_system(const CellSpec& spec);

/// Runs one cell: builds the system, plants a random attack of size s scaled
/// to the clean measurement norm, times the decomposition phase and both
/// solvers, and compares their answers.  The timeout is checked between
/// phases; an exceeded cell is returned marked timed_out with whatever was
/// measured so far.
CellResult run_cell(const CellSpec& spec, double timeout_seconds = 60.0);

/// Slope cells at n = 8, 16, 32, 64 (N = 6, s = 1), the subset-count
/// comparison cell (n = 6, r = 3, N = 12, s = 2) and the degenerate
/// single-eigenvalue cell (n = 2, N = 8, s = 2).
std::vector<CellSpec> default_grid(std::uint64_t seed);

/// Runs every cell; a cell whose solvers disagree aborts the run with
/// NumericError (timing a wrong answer is meaningless).
std::vector<CellResult> run_grid(const std::vector<CellSpec>& grid,
                                 double timeout_seconds = 60.0);

/// Least-squares slope of log(t_decompose) against log(n) over the "slope"
/// family cells; NaN when fewer than two usable cells exist.
double fitted_slope(const std::vector<CellResult>& results);

/// Deterministic columns only (no wall times), so identical seeds give
/// byte-identical CSV.  Times are reported in the JSON output instead.
std::string csv_header();
std::string csv_row(const CellResult& r);

}  // namespace ssr::bench
