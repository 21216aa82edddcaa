#pragma once

#include "blade/calib/scale.h"
#include "blade/eval/metrics.h"

#include <string>
#include <vector>

namespace blade {

/// One sweep frame with everything the scale analysis needs.
struct ScaleSweepFrame
{
	double z_gt = 0.0;
	CentroidFrame centroids;          ///< unscaled centroid frame
	double z_est_uncorrected = 0.0;   ///< median frame depth before scaling
	double z_est_corrected = 0.0;     ///< after scaling
};

struct ScaleSweepReport
{
	std::vector<double> z;
	std::vector<double> eps_uncorrected;   ///< per-frame scale error, no correction
	std::vector<double> eps_corrected;     ///< after the fitted model
	double median_abs_uncorrected = 0.0;
	double median_abs_corrected = 0.0;
	DepthSweepResult ez_uncorrected;
	DepthSweepResult ez_corrected;
	bool corrected_closer_to_zero = false;
};

/// Paired before/after tables of epsilon_scale and epsilon_z; optionally writes
/// <stem>_scale.tsv/.ppm and <stem>_ez.tsv/.ppm.
ScaleSweepReport scale_sweep_report(const std::vector<ScaleSweepFrame>& frames,
                                    const ScaleModel& fitted, const std::string& stem = "");

} // namespace blade
