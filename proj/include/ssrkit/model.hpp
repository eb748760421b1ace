#pragma once

#include "ssrkit/types.hpp"

#include <vector>

namespace ssr {

/// One sensor: its 1-based id and its measurement rows.
struct SensorDef {
  int id = 0;
  Mat C;  // p_i x n
};

/// Discrete-time system x(t+1) = A x(t) observed through N sensors
/// y_i(t) = C_i x(t).
struct LtiSystem {
  Mat A;                           // n x n
  std::vector<SensorDef> sensors;  // ids 1..N, ascending

  int n() const { return static_cast<int>(A.rows()); }
  int N() const { return static_cast<int>(sensors.size()); }
  const SensorDef& sensor(int id) const;
};

/// Stacked observation map of one sensor over `tau` time steps:
/// rows C_i, C_i A, ..., C_i A^(tau-1).
struct ObservabilityMatrix {
  int sensor_id = 0;
  int tau = 0;
  Mat O;  // (p_i * tau) x n
};

/// Per-sensor measurement vectors, index-aligned with the system's sensors;
/// Y[i] stacks sensor i+1's outputs over its observation horizon.
struct MeasurementBundle {
  std::vector<Vec> Y;

  double stacked_norm() const;
};

/// Checks dimensions, finiteness and sensor ids (must be exactly 1..N in
/// order); throws ValidationError with a description of the first defect.
LtiSystem validate_system(Mat A, std::vector<SensorDef> sensors);

/// Observation horizon policy: the stack always uses the full horizon n
/// (Cayley-Hamilton bound), except that it collapses to a single block when
/// that block already attains the full-horizon rank -- sensors whose
/// information is static, e.g. under A = I, keep tau = 1.
ObservabilityMatrix observability_matrix(const LtiSystem& sys, int sensor_id,
                                         const Tolerances& tol = {});

std::vector<ObservabilityMatrix> all_observability_matrices(const LtiSystem& sys,
                                                            const Tolerances& tol = {});

/// Throws ValidationError unless the bundle has one vector per sensor with
/// length p_i * tau_i.
void validate_measurements(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                           const MeasurementBundle& yb);

}  // namespace ssr
