#pragma once

#include "blade/depth/matching.h"

#include <cstdint>
#include <vector>

namespace blade {

enum class DepthState : std::uint8_t { invalid = 0, valid = 1, untextured = 2 };

/// Virtual depth map: one entry per micro-image (coarse) or per pixel (refined).
struct VirtualDepthMap
{
	EstimationMode mode = EstimationMode::coarse;
	std::size_t width = 0, height = 0; ///< grid dims (coarse) or sensor dims (refined)
	std::vector<double> values;        ///< v, kNoDepth when not valid
	std::vector<DepthState> states;
	std::vector<double> costs;         ///< cost at the estimate, diagnostics

	double value(std::size_t x, std::size_t y) const { return values[y * width + x]; }
	DepthState state(std::size_t x, std::size_t y) const { return states[y * width + x]; }
	std::size_t valid_count() const;

	static VirtualDepthMap create(EstimationMode mode, std::size_t w, std::size_t h);
};

struct MetricDepthEntry
{
	P3D point;          ///< camera frame [mm]
	std::size_t k = 0, l = 0;   ///< provenance lens
	std::size_t px = 0, py = 0; ///< provenance pixel (anchor pixel for coarse entries)
};

struct MetricDepthMap
{
	EstimationMode mode = EstimationMode::coarse;
	std::size_t width = 0, height = 0;
	std::vector<MetricDepthEntry> entries;          ///< valid entries only
	std::vector<double> z_values;                   ///< dense z grid, kNoDepth when invalid
	std::vector<DepthState> states;

	std::vector<P3D> points() const
	{
		std::vector<P3D> pts;
		pts.reserve(entries.size());
		for (const auto& e : entries) pts.push_back(e.point);
		return pts;
	}
};

/// Per micro-image depth estimation: same-type initialization over the full range,
/// then mixed-type refinement in [v0 - N, v0 + N].
VirtualDepthMap estimate_coarse(const ImageF& raw, const CameraConfig& cfg, const MiaLayout& mia,
                                const EstimatorSettings& settings);

/// Per pixel estimation, two passes over each micro-image.
VirtualDepthMap estimate_refined(const ImageF& raw, const CameraConfig& cfg, const MiaLayout& mia,
                                 const EstimatorSettings& settings);

/// Dispatch on settings.mode.
VirtualDepthMap estimate(const ImageF& raw, const CameraConfig& cfg, const MiaLayout& mia,
                         const EstimatorSettings& settings);

/// Back-project every valid entry and apply the configured depth scaling.
/// Entries whose virtual depth is not positive are dropped.
MetricDepthMap to_metric(const VirtualDepthMap& vmap, const CameraConfig& cfg, const MiaLayout& mia);

/// Search range [v_min, v_max] derived from the settings and camera geometry.
void search_range(const CameraConfig& cfg, const MiaLayout& mia, const EstimatorSettings& settings,
                  double& v_min, double& v_max);

} // namespace blade
