#pragma once

#include <cstddef>
#include <map>
#include <vector>

namespace blade {

/// One frame of a depth sweep: ground-truth depth and the estimate (median of the
/// frame's per-entry depths).
struct SweepFrame
{
	double z_gt = 0.0;
	double z_est = 0.0;
};

struct DepthSweepResult
{
	/// displacement -> mean relative displacement error over qualifying frame pairs
	std::map<double, double> error_by_displacement;
	std::map<double, std::size_t> pairs_by_displacement;
	double mean_error = 0.0;       ///< over all pairs
	double ci95_half_width = 0.0;  ///< normal-approximation 95% interval
	std::size_t pair_count = 0;
};

/// Relative displacement error: for every ordered pair (n, m) with z_m > z_n,
/// |dz - dz_hat| / dz grouped by the ground-truth displacement dz (rounded to 1e-6).
/// Throws std::invalid_argument with fewer than two frames.
DepthSweepResult relative_depth_error(const std::vector<SweepFrame>& frames);

double median(std::vector<double> values);

/// Linear-interpolation percentile (q in [0, 1]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

} // namespace blade
