#pragma once

#include "blade/calib/extrinsics.h"
#include "blade/calib/scale.h"
#include "blade/sim/render.h"

namespace blade {

/// Corner observation clusters of the scene's checkerboard through every micro-lens
/// that sees them. In pinhole mode the features are exact model projections; in full
/// mode they are radiance centroids of aperture-sampled spot images, and the blur
/// radii carry the frame's virtual depth: the one passed in (usually the depth
/// estimator's own measurement of the rendered frame) or, when absent, a direct
/// triangulation of the observed spot disparities. Throws std::invalid_argument when
/// the scene has no checkerboard or a corner is visible in no lens.
ScaleObservation export_observations(const Scene& scene, const CameraConfig& cfg,
                                     const RenderSettings& settings,
                                     double frame_virtual_depth = 0.0);

/// Same observation machinery for an explicit target list; the points are returned
/// in an external frame defined by ext_from_cam.
PointConstellation export_constellation(const std::vector<P3D>& targets_cam,
                                        const CameraConfig& cfg, const RenderSettings& settings,
                                        const Rigid& ext_from_cam = Rigid::identity());

/// Subsampled chief-ray hit cloud; `ext_from_cam` re-expresses it in an external frame.
std::vector<P3D> export_point_cloud(const GroundTruth& gt, std::size_t stride,
                                    const Rigid& ext_from_cam = Rigid::identity());

} // namespace blade
