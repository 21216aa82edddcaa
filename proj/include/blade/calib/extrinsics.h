#pragma once

#include "blade/calib/lm.h"
#include "blade/model/camera.h"

#include <vector>

namespace blade {

/// 3-D targets in an external frame with their BAP observation clusters.
struct PointConstellation
{
	std::vector<P3D> points; ///< positions in the external (lidar/world) frame [mm]
	std::vector<std::vector<BapFeature>> clusters; ///< one cluster per point
};

struct RegistrationResult
{
	Rigid cam_from_ext;        ///< maps external-frame points into the camera frame
	double pnp_rmse = 0.0;     ///< (u, v) reprojection RMSE of the PnP initialization [pixel]
	double refined_rmse = 0.0; ///< (u, v) reprojection RMSE after LM refinement [pixel]
	int iterations = 0;
	bool converged = true;
};

/// Absolute pose from 2-D/3-D correspondences, observations as normalized image
/// coordinates (x/z, y/z). Needs >= 4 non-coplanar points.
Rigid solve_pnp(const std::vector<P2D>& normalized, const std::vector<P3D>& points);

/// Four-step registration: cluster barycenters as pinhole projections, PnP
/// initialization, then LM refinement of the full blur-aware reprojection error.
RegistrationResult register_constellation(const CameraConfig& cfg,
                                          const PointConstellation& constellation,
                                          const LmSettings& settings = {});

} // namespace blade
