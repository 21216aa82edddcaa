#include "blade/depth/depthmap_io.h"

#include "blade/io/raster_io.h"

#include <algorithm>
#include <cmath>

namespace blade {

namespace {

ImageRgb8 false_color_view(const std::vector<double>& values, const std::vector<DepthState>& states,
                           std::size_t w, std::size_t h)
{
	double lo = 1e300, hi = -1e300;
	for (std::size_t i = 0; i < values.size(); ++i)
	{
		if (states[i] != DepthState::valid) continue;
		lo = std::min(lo, values[i]);
		hi = std::max(hi, values[i]);
	}
	if (hi <= lo) { lo = 0.0; hi = 1.0; }

	ImageRgb8 img = ImageRgb8::create(w, h);
	for (std::size_t y = 0; y < h; ++y)
		for (std::size_t x = 0; x < w; ++x)
		{
			const std::size_t i = y * w + x;
			if (states[i] != DepthState::valid) continue;
			std::uint8_t r, g, b;
			false_color((values[i] - lo) / (hi - lo), r, g, b);
			img.set(x, y, r, g, b);
		}
	return img;
}

} // namespace

void write_virtual_depth_map(const VirtualDepthMap& map, const std::string& stem)
{
	ImageF vals(map.width, map.height);
	ImageF mask(map.width, map.height);
	for (std::size_t i = 0; i < map.values.size(); ++i)
	{
		vals.data()[i] = map.states[i] == DepthState::valid ? static_cast<float>(map.values[i]) : 0.f;
		mask.data()[i] = map.states[i] == DepthState::valid ? 1.f : 0.f;
	}
	write_pfm(vals, stem + ".pfm");
	write_pgm(mask, stem + "_mask.pgm", 255);
	write_ppm(false_color_view(map.values, map.states, map.width, map.height), stem + "_view.ppm");
}

VirtualDepthMap read_virtual_depth_map(const std::string& stem, EstimationMode mode)
{
	const ImageF vals = read_pfm(stem + ".pfm");
	const ImageF mask = read_pgm(stem + "_mask.pgm");
	VirtualDepthMap map = VirtualDepthMap::create(mode, vals.width(), vals.height());
	for (std::size_t i = 0; i < map.values.size(); ++i)
	{
		if (mask.data()[i] > 0.5f)
		{
			map.values[i] = vals.data()[i];
			map.states[i] = DepthState::valid;
		}
	}
	return map;
}

void write_metric_depth_map(const MetricDepthMap& map, const std::string& stem)
{
	ImageF vals(map.width, map.height);
	ImageF mask(map.width, map.height);
	for (std::size_t i = 0; i < map.z_values.size(); ++i)
	{
		vals.data()[i] = map.states[i] == DepthState::valid ? static_cast<float>(map.z_values[i]) : 0.f;
		mask.data()[i] = map.states[i] == DepthState::valid ? 1.f : 0.f;
	}
	write_pfm(vals, stem + "_z.pfm");
	write_pgm(mask, stem + "_mask.pgm", 255);
	write_ppm(false_color_view(map.z_values, map.states, map.width, map.height), stem + "_view.ppm");
	write_xyz(map.points(), stem + "_points.xyz");
}

} // namespace blade
