#include "blade/eval/csad.h"

#include "blade/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blade {

std::size_t Csad::valid_count() const
{
	std::size_t n = 0;
	for (const auto m : mask)
		if (m) ++n;
	return n;
}

Csad build_csad(const std::vector<P3D>& points_cam, const CameraConfig& cfg, std::size_t factor,
                CsadAggregator aggregator)
{
	if (points_cam.empty()) throw std::invalid_argument("build_csad: empty input");
	if (factor == 0) throw std::invalid_argument("build_csad: factor must be >= 1");

	Csad csad;
	csad.factor = factor;
	csad.width = cfg.sensor.width / factor;
	csad.height = cfg.sensor.height / factor;
	csad.z.assign(csad.width * csad.height, 0.f);
	csad.mask.assign(csad.width * csad.height, 0);

	// pinhole projection, sensor at F, pixel size factor * s, image inverted
	const double fpx = cfg.main_lens.focal / (static_cast<double>(factor) * cfg.sensor.pixel_size);
	const double u0 = cfg.main_lens.u0 / static_cast<double>(factor);
	const double v0 = cfg.main_lens.v0 / static_cast<double>(factor);

	std::vector<std::vector<float>> bins(csad.width * csad.height);
	for (const auto& p : points_cam)
	{
		if (not (p.z() > 0.0)) continue;
		const double u = u0 - fpx * p.x() / p.z();
		const double v = v0 - fpx * p.y() / p.z();
		const long x = std::lround(u);
		const long y = std::lround(v);
		if (x < 0 or y < 0 or x >= static_cast<long>(csad.width) or y >= static_cast<long>(csad.height))
			continue;
		bins[static_cast<std::size_t>(y) * csad.width + x].push_back(static_cast<float>(p.z()));
	}

	for (std::size_t i = 0; i < bins.size(); ++i)
	{
		if (bins[i].empty()) continue;
		csad.mask[i] = 1;
		if (aggregator == CsadAggregator::min)
		{
			csad.z[i] = *std::min_element(bins[i].begin(), bins[i].end());
		}
		else
		{
			std::vector<double> vals(bins[i].begin(), bins[i].end());
			csad.z[i] = static_cast<float>(median(std::move(vals)));
		}
	}

	// 3x3 median filter over valid depth values; the mask is untouched here
	std::vector<float> filtered = csad.z;
	for (long y = 0; y < static_cast<long>(csad.height); ++y)
	{
		for (long x = 0; x < static_cast<long>(csad.width); ++x)
		{
			const std::size_t i = static_cast<std::size_t>(y) * csad.width + x;
			if (not csad.mask[i]) continue;
			std::vector<double> window;
			for (long dy = -1; dy <= 1; ++dy)
				for (long dx = -1; dx <= 1; ++dx)
				{
					const long nx = x + dx, ny = y + dy;
					if (nx < 0 or ny < 0 or nx >= static_cast<long>(csad.width) or
					    ny >= static_cast<long>(csad.height))
						continue;
					const std::size_t ni = static_cast<std::size_t>(ny) * csad.width + nx;
					if (csad.mask[ni]) window.push_back(csad.z[ni]);
				}
			filtered[i] = static_cast<float>(median(std::move(window)));
		}
	}
	csad.z = std::move(filtered);

	// 3x3 erosion of the validity mask
	std::vector<std::uint8_t> eroded(csad.mask.size(), 0);
	for (long y = 0; y < static_cast<long>(csad.height); ++y)
	{
		for (long x = 0; x < static_cast<long>(csad.width); ++x)
		{
			bool keep = true;
			for (long dy = -1; dy <= 1 and keep; ++dy)
				for (long dx = -1; dx <= 1 and keep; ++dx)
				{
					const long nx = x + dx, ny = y + dy;
					if (nx < 0 or ny < 0 or nx >= static_cast<long>(csad.width) or
					    ny >= static_cast<long>(csad.height))
					{
						keep = false;
						break;
					}
					if (not csad.mask[static_cast<std::size_t>(ny) * csad.width + nx]) keep = false;
				}
			if (keep) eroded[static_cast<std::size_t>(y) * csad.width + x] = 1;
		}
	}
	for (std::size_t i = 0; i < csad.mask.size(); ++i)
		if (not eroded[i]) { csad.mask[i] = 0; csad.z[i] = 0.f; }

	return csad;
}

QualityStats quality_map(const Csad& estimated, const Csad& ground_truth, ImageF* ad_image)
{
	if (estimated.width != ground_truth.width or estimated.height != ground_truth.height)
		throw std::invalid_argument("quality_map: dimension mismatch");

	if (ad_image) *ad_image = ImageF(estimated.width, estimated.height);

	std::vector<double> errors;
	for (std::size_t i = 0; i < estimated.z.size(); ++i)
	{
		if (not estimated.mask[i] or not ground_truth.mask[i]) continue;
		const double ad = std::abs(static_cast<double>(estimated.z[i]) - ground_truth.z[i]);
		errors.push_back(ad);
		if (ad_image) ad_image->data()[i] = static_cast<float>(ad);
	}
	if (errors.empty()) throw std::invalid_argument("quality_map: empty intersection mask");

	QualityStats stats;
	stats.pixel_count = errors.size();
	stats.q25 = percentile(errors, 0.25);
	stats.median = percentile(errors, 0.5);
	stats.q75 = percentile(errors, 0.75);
	return stats;
}

} // namespace blade
