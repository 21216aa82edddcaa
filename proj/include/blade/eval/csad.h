#pragma once

#include "blade/depth/image.h"
#include "blade/model/camera.h"

#include <vector>

namespace blade {

enum class CsadAggregator { min, median };

/// Central sub-aperture depth map: the scene re-projected through an equivalent
/// pinhole camera (sensor at F, pixel size scaled by the factor S).
struct Csad
{
	std::size_t width = 0, height = 0;
	std::size_t factor = 4;
	std::vector<float> z;           ///< [mm], 0 where invalid
	std::vector<std::uint8_t> mask; ///< validity

	double at(std::size_t x, std::size_t y) const { return z[y * width + x]; }
	bool valid(std::size_t x, std::size_t y) const { return mask[y * width + x] != 0; }
	std::size_t valid_count() const;
};

/// z-buffer projection of camera-frame points, then a 3x3 median filter on the depth
/// values and a 3x3 morphological erosion of the validity mask.
/// Throws std::invalid_argument on empty input; an all-behind-camera cloud yields an
/// empty (all-invalid) map.
Csad build_csad(const std::vector<P3D>& points_cam, const CameraConfig& cfg, std::size_t factor,
                CsadAggregator aggregator);

struct QualityStats
{
	double q25 = 0.0, median = 0.0, q75 = 0.0; ///< [mm]
	std::size_t pixel_count = 0;               ///< comparison mask size
};

/// Absolute difference over the intersection mask of the two maps.
/// Throws std::invalid_argument on dimension mismatch or empty intersection.
QualityStats quality_map(const Csad& estimated, const Csad& ground_truth, ImageF* ad_image = nullptr);

} // namespace blade
