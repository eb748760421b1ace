#include "ssrkit/decompose.hpp"

#include "ssrkit/linalg.hpp"

#include <string>

namespace ssr {

SubsystemBundle decompose_system(const LtiSystem& sys, const EigenStructure& es,
                                 const DirectSum& ds, const Tolerances& tol) {
  tol.validate();
  if (es.block_count() != ds.block_count())
    throw ValidationError("decompose_system: structure and direct sum disagree");
  if (ds.M.rows() != sys.n()) throw ValidationError("decompose_system: dimension mismatch");

  SubsystemBundle b;
  b.structure = es;
  b.sum = ds;
  const int r = ds.block_count();
  for (int j = 0; j < r; ++j) b.A_block.push_back(restrict_map(sys.A, ds, j, tol));
  b.obs = all_observability_matrices(sys, tol);

  for (int i = 0; i < sys.N(); ++i) {
    const Mat& O = b.obs[static_cast<std::size_t>(i)].O;
    const Eigen::Index rows = O.rows();
    std::vector<SensorBlock> blocks(static_cast<std::size_t>(r));

    int total_rank = 0;
    for (int j = 0; j < r; ++j) {
      auto& sb = blocks[static_cast<std::size_t>(j)];
      const Mat restricted = O * ds.basis[static_cast<std::size_t>(j)];
      sb.C = sys.sensors[static_cast<std::size_t>(i)].C * ds.basis[static_cast<std::size_t>(j)];
      // Rank relative to the full map's scale: a restriction that is pure
      // round-off of O must come out as the zero block, not a junk direction.
      sb.image = linalg::range_basis(restricted, tol.rank_rtol, O.norm());
      sb.rank = static_cast<int>(sb.image.cols());
      if (sb.rank == 0) {
        sb.zero = true;
        sb.O = Mat::Zero(rows, ds.dim(j));
        sb.C = Mat::Zero(sb.C.rows(), sb.C.cols());
        sb.P = Mat::Zero(rows, rows);
      } else {
        sb.O = restricted;
      }
      total_rank += sb.rank;
    }

    Mat G(rows, total_rank);
    int col = 0;
    for (int j = 0; j < r; ++j) {
      const auto& sb = blocks[static_cast<std::size_t>(j)];
      if (sb.rank > 0) {
        G.middleCols(col, sb.rank) = sb.image;
        col += sb.rank;
      }
    }

    if (total_rank > 0) {
      if (linalg::svd_rank(G, tol.rank_rtol) != total_rank)
        throw NumericError("decompose_system: sensor " + std::to_string(i + 1) +
                           ": per-block images are not independent (numerical degeneracy)");
      const Mat G_pinv = linalg::pinv(G, tol.rank_rtol);
      col = 0;
      for (int j = 0; j < r; ++j) {
        auto& sb = blocks[static_cast<std::size_t>(j)];
        if (sb.rank > 0) {
          sb.P = sb.image * G_pinv.middleRows(col, sb.rank);
          col += sb.rank;
        }
      }
      b.in_image.push_back(G * G_pinv);
    } else {
      b.in_image.push_back(Mat::Zero(rows, rows));
    }
    b.image_rank.push_back(total_rank);
    b.sensor_block.push_back(std::move(blocks));
  }
  return b;
}

ProjectedMeasurements project_measurements(const SubsystemBundle& b, const MeasurementBundle& yb) {
  const int N = static_cast<int>(b.sensor_block.size());
  if (static_cast<int>(yb.Y.size()) != N)
    throw ValidationError("project_measurements: bundle size mismatch");

  ProjectedMeasurements out;
  out.Y.resize(static_cast<std::size_t>(N));
  out.residual.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const Vec& y = yb.Y[static_cast<std::size_t>(i)];
    if (y.size() != b.obs[static_cast<std::size_t>(i)].O.rows())
      throw ValidationError("project_measurements: sensor " + std::to_string(i + 1) +
                            ": measurement length mismatch");
    const auto& blocks = b.sensor_block[static_cast<std::size_t>(i)];
    auto& parts = out.Y[static_cast<std::size_t>(i)];
    parts.reserve(blocks.size());
    for (const auto& sb : blocks) parts.push_back(sb.P * y);
    out.residual[static_cast<std::size_t>(i)] =
        (y - b.in_image[static_cast<std::size_t>(i)] * y).norm();
  }
  return out;
}

Vec recompose_state(const DirectSum& ds, const std::vector<std::optional<Vec>>& parts) {
  if (static_cast<int>(parts.size()) != ds.block_count())
    throw ValidationError("recompose_state: expected " + std::to_string(ds.block_count()) +
                          " parts, got " + std::to_string(parts.size()));
  Vec x = Vec::Zero(ds.M.rows());
  for (int j = 0; j < ds.block_count(); ++j) {
    const auto& part = parts[static_cast<std::size_t>(j)];
    if (!part)
      throw ValidationError("recompose_state: missing part for block " + std::to_string(j));
    if (part->size() != ds.dim(j))
      throw ValidationError("recompose_state: part " + std::to_string(j) + " has dimension " +
                            std::to_string(part->size()) + ", expected " + std::to_string(ds.dim(j)));
    x += ds.basis[static_cast<std::size_t>(j)] * (*part);
  }
  return x;
}

}  // namespace ssr
