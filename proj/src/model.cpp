#include "ssrkit/model.hpp"

#include "ssrkit/linalg.hpp"

#include <cmath>
#include <string>

namespace ssr {

namespace {

bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace

const SensorDef& LtiSystem::sensor(int id) const {
  if (id < 1 || id > N()) throw ValidationError("unknown sensor id " + std::to_string(id));
  return sensors[static_cast<std::size_t>(id - 1)];
}

double MeasurementBundle::stacked_norm() const {
  double sq = 0.0;
  for (const auto& y : Y) sq += y.squaredNorm();
  return std::sqrt(sq);
}

LtiSystem validate_system(Mat A, std::vector<SensorDef> sensors) {
  if (A.rows() == 0 || A.rows() != A.cols())
    throw ValidationError("A must be square and nonempty, got " + std::to_string(A.rows()) + "x" +
                          std::to_string(A.cols()));
  if (!all_finite(A)) throw ValidationError("A has non-finite entries");
  if (sensors.empty()) throw ValidationError("at least one sensor is required");

  const int n = static_cast<int>(A.rows());
  for (std::size_t k = 0; k < sensors.size(); ++k) {
    const auto& s = sensors[k];
    const int expected = static_cast<int>(k) + 1;
    if (s.id != expected) {
      if (s.id >= 1 && static_cast<std::size_t>(s.id) <= k + 1)
        throw ValidationError("duplicate or out-of-order sensor id " + std::to_string(s.id));
      throw ValidationError("sensor ids must be exactly 1..N in order; position " +
                            std::to_string(k + 1) + " has id " + std::to_string(s.id));
    }
    if (s.C.rows() < 1)
      throw ValidationError("sensor " + std::to_string(s.id) + ": C must have at least one row");
    if (s.C.cols() != n)
      throw ValidationError("sensor " + std::to_string(s.id) + ": C has " +
                            std::to_string(s.C.cols()) + " columns, expected " + std::to_string(n));
    if (!all_finite(s.C))
      throw ValidationError("sensor " + std::to_string(s.id) + ": C has non-finite entries");
  }
  return LtiSystem{std::move(A), std::move(sensors)};
}

ObservabilityMatrix observability_matrix(const LtiSystem& sys, int sensor_id,
                                         const Tolerances& tol) {
  tol.validate();
  const auto& s = sys.sensor(sensor_id);
  const int n = sys.n();
  const Eigen::Index p = s.C.rows();

  Mat full(p * n, n);
  Mat block = s.C;
  for (int t = 0; t < n; ++t) {
    full.middleRows(p * t, p) = block;
    if (t + 1 < n) block = block * sys.A;
  }

  const int full_rank = linalg::svd_rank(full, tol.rank_rtol);
  const int first_rank = linalg::svd_rank(s.C, tol.rank_rtol);
  if (first_rank == full_rank) return ObservabilityMatrix{sensor_id, 1, s.C};
  return ObservabilityMatrix{sensor_id, n, std::move(full)};
}

std::vector<ObservabilityMatrix> all_observability_matrices(const LtiSystem& sys,
                                                            const Tolerances& tol) {
  std::vector<ObservabilityMatrix> out;
  out.reserve(sys.N());
  for (int id = 1; id <= sys.N(); ++id) out.push_back(observability_matrix(sys, id, tol));
  return out;
}

void validate_measurements(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                           const MeasurementBundle& yb) {
  if (static_cast<int>(yb.Y.size()) != sys.N())
    throw ValidationError("measurement bundle has " + std::to_string(yb.Y.size()) +
                          " entries, expected " + std::to_string(sys.N()));
  if (static_cast<int>(obs.size()) != sys.N())
    throw ValidationError("observability matrix list does not cover all sensors");
  for (int i = 0; i < sys.N(); ++i) {
    const auto& y = yb.Y[static_cast<std::size_t>(i)];
    if (y.size() != obs[static_cast<std::size_t>(i)].O.rows())
      throw ValidationError("sensor " + std::to_string(i + 1) + ": measurement length " +
                            std::to_string(y.size()) + " does not match its horizon (" +
                            std::to_string(obs[static_cast<std::size_t>(i)].O.rows()) + ")");
    if (!y.allFinite())
      throw ValidationError("sensor " + std::to_string(i + 1) + ": non-finite measurement");
  }
}

}  // namespace ssr
