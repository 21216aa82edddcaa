#pragma once

#include "blade/calib/lm.h"
#include "blade/model/camera.h"

namespace blade {

/// Axis-aligned sampling box in the virtual intermediate space [mm].
struct SamplingVolume
{
	P3D lo{-8.0, -8.0, -58.0};
	P3D hi{8.0, 8.0, -50.0};
	std::size_t samples_per_axis = 9; ///< uniform grid, deterministic

	bool degenerate() const
	{
		return not (hi.x() > lo.x() and hi.y() > lo.y() and hi.z() >= lo.z());
	}
};

struct InverseDistortionReport
{
	int iterations = 0;
	double rmse = 0.0; ///< sqrt(mean ||p - inv(dist(p))||^2) over the volume [mm]
	bool converged = true;
	std::vector<double> cost_trace;
};

/// Fit the inverse Brown coefficients so that undistort(distort(p)) returns p over a
/// uniform grid in the given volume. Coefficients start from the direct ones.
InverseDistortionParams calibrate_inverse_distortion(
	const DistortionParams& direct, const SamplingVolume& volume,
	InverseDistortionReport& report, const LmSettings& settings = {});

} // namespace blade
