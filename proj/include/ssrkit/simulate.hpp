#pragma once

#include "ssrkit/model.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ssr {

/// Deterministic uniform generator.  std::mt19937_64 has a fully specified
/// sequence and the [0,1) mapping below avoids std::uniform_real_distribution,
/// whose output is implementation-defined; results are identical across
/// platforms for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Inclusive integer range; the modulo bias is irrelevant at our span sizes.
  int uniform_int(int lo, int hi);
  Vec vec(Eigen::Index n, double lo, double hi);
  /// k distinct values from {1..n}, ascending.
  std::vector<int> sample_ids(int n, int k);

 private:
  std::mt19937_64 eng_;
};

/// Which sensors are corrupted and by what, plus (for stealth scenarios) the
/// other state/attack pair the corrupted data is equally consistent with.
struct AttackScenario {
  std::vector<int> attacked;  // ascending 1-based ids
  std::vector<Vec> signals;   // aligned with `attacked`, each over that sensor's horizon
  std::string strategy = "none";
  std::optional<Vec> alt_state;
  std::optional<std::vector<int>> alt_attacked;
};

/// Columns x(0), x(1) = A x(0), ..., x(T).
Mat simulate_trajectory(const Mat& A, const Vec& x0, int T);

/// Y_i = O_i x0, attack-free.
MeasurementBundle exact_measurements(const LtiSystem& sys,
                                     const std::vector<ObservabilityMatrix>& obs, const Vec& x0);

/// Y_i = O_i x0 + E_i on attacked sensors, plus per-entry uniform noise in
/// [-noise_bound, noise_bound] everywhere when noise_bound > 0.  Deterministic
/// for a fixed seed.
MeasurementBundle measure(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                          const Vec& x0, const AttackScenario& scenario, double noise_bound = 0.0,
                          std::uint64_t seed = 0);

/// Uniformly chosen support of size s, signal entries uniform in
/// [-magnitude, magnitude].
AttackScenario random_attack(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                             int s, double magnitude, std::uint64_t seed);

/// Undetectable attack: finds the smallest sensor set K whose removal leaves
/// a nontrivial kernel (it must satisfy |K| <= 2s, i.e. the system must not
/// be 2s-sparse observable, else InfeasibleError), picks a kernel direction
/// delta scaled to the size of x0, attacks the first half K1 of K (|K1| <= s)
/// with E_i = O_i delta.  The corrupted measurements are then exactly
/// consistent both with (x0, K1 attacked) and with (x0 + delta, K2 attacked).
AttackScenario stealth_attack(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                              const Vec& x0, int s, const Tolerances& tol = {},
                              std::uint64_t budget = kDefaultBudget, int threads = 1);

}  // namespace ssr
