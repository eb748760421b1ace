#pragma once

#include "ssrkit/model.hpp"
#include "ssrkit/spectral.hpp"

#include <optional>
#include <vector>

namespace ssr {

/// Restriction of one sensor's stacked observation map to one eigen-block.
struct SensorBlock {
  /// O_i composed with the block inclusion, in block coordinates
  /// ((p_i tau_i) x d_j); an exact zero matrix when the image vanishes.
  Mat O;
  /// Orthonormal basis of the image O_i(V_j), zero columns when it vanishes.
  Mat image;
  /// Oblique projector of measurement space onto that image, along the other
  /// blocks' images and the orthogonal complement of O_i's full image.
  Mat P;
  /// Output map C_i restricted to the block (p_i x d_j).
  Mat C;
  bool zero = false;
  int rank = 0;
};

/// Everything the per-eigenvalue solvers need: block dynamics, restricted
/// observation maps, measurement projectors and the per-sensor image data.
struct SubsystemBundle {
  EigenStructure structure;
  DirectSum sum;
  std::vector<Mat> A_block;                             // d_j x d_j
  std::vector<ObservabilityMatrix> obs;                 // per sensor
  std::vector<std::vector<SensorBlock>> sensor_block;   // [sensor][block]
  std::vector<Mat> in_image;                            // per sensor, orthogonal projector onto O_i(R^n)
  std::vector<int> image_rank;                          // per sensor

  int block_count() const { return static_cast<int>(A_block.size()); }
};

/// Per-sensor, per-block measurement components plus the out-of-image
/// residual norm (the part of Y_i no state can explain).
struct ProjectedMeasurements {
  std::vector<std::vector<Vec>> Y;  // [sensor][block]
  std::vector<double> residual;     // per sensor
};

/// Splits the system along the eigenstructure's direct sum.  Verifies that
/// the nonzero per-sensor images are independent and throws NumericError if
/// that degenerates numerically.
SubsystemBundle decompose_system(const LtiSystem& sys, const EigenStructure& es,
                                 const DirectSum& ds, const Tolerances& tol = {});

/// Routes each sensor's measurement into per-block components; whatever falls
/// outside the sensor's image is reported per sensor, not assigned to a block.
ProjectedMeasurements project_measurements(const SubsystemBundle& b, const MeasurementBundle& yb);

/// x = sum of basis_j * part_j.  Throws ValidationError when a part is
/// missing or has the wrong dimension.
Vec recompose_state(const DirectSum& ds, const std::vector<std::optional<Vec>>& parts);

}  // namespace ssr
