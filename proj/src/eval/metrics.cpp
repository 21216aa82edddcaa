#include "blade/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blade {

DepthSweepResult relative_depth_error(const std::vector<SweepFrame>& frames)
{
	if (frames.size() < 2)
		throw std::invalid_argument("relative_depth_error: need at least two frames");

	DepthSweepResult res;
	std::map<double, std::vector<double>> buckets;
	std::vector<double> all;

	for (std::size_t n = 0; n < frames.size(); ++n)
	{
		for (std::size_t m = 0; m < frames.size(); ++m)
		{
			const double dz = frames[m].z_gt - frames[n].z_gt;
			if (dz <= 0.0) continue;
			const double dz_hat = frames[m].z_est - frames[n].z_est;
			const double err = std::abs(dz - dz_hat) / dz;
			const double key = std::round(dz * 1e6) / 1e6;
			buckets[key].push_back(err);
			all.push_back(err);
		}
	}

	for (const auto& [dz, errs] : buckets)
	{
		double sum = 0.0;
		for (const double e : errs) sum += e;
		res.error_by_displacement[dz] = sum / static_cast<double>(errs.size());
		res.pairs_by_displacement[dz] = errs.size();
	}

	res.pair_count = all.size();
	double sum = 0.0;
	for (const double e : all) sum += e;
	res.mean_error = sum / static_cast<double>(all.size());
	double var = 0.0;
	for (const double e : all) var += (e - res.mean_error) * (e - res.mean_error);
	if (all.size() > 1)
	{
		var /= static_cast<double>(all.size() - 1);
		res.ci95_half_width = 1.959963984540054 * std::sqrt(var / static_cast<double>(all.size()));
	}
	return res;
}

double median(std::vector<double> values)
{
	if (values.empty()) throw std::invalid_argument("median: empty sample");
	return percentile(std::move(values), 0.5);
}

double percentile(std::vector<double> values, double q)
{
	if (values.empty()) throw std::invalid_argument("percentile: empty sample");
	if (q < 0.0 or q > 1.0) throw std::invalid_argument("percentile: q outside [0, 1]");
	std::sort(values.begin(), values.end());
	const double pos = q * static_cast<double>(values.size() - 1);
	const std::size_t lo = static_cast<std::size_t>(pos);
	const std::size_t hi = std::min(lo + 1, values.size() - 1);
	const double frac = pos - static_cast<double>(lo);
	return values[lo] * (1.0 - frac) + values[hi] * frac;
}

} // namespace blade
