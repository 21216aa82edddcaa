#pragma once

#include "blade/depth/estimator.h"

#include <string>

namespace blade {

/// Writes <stem>.pfm (values, invalid as 0), <stem>_mask.pgm (8-bit validity) and
/// <stem>_view.ppm (false color).
void write_virtual_depth_map(const VirtualDepthMap& map, const std::string& stem);
VirtualDepthMap read_virtual_depth_map(const std::string& stem, EstimationMode mode);

/// Writes <stem>_z.pfm, <stem>_mask.pgm, <stem>_view.ppm and <stem>_points.xyz.
void write_metric_depth_map(const MetricDepthMap& map, const std::string& stem);

} // namespace blade
