#pragma once

#include "blade/model/camera.h"

#include <string>

namespace blade {

/// Load a camera configuration, recompute derived coefficients and validate invariants.
/// When the file carries a [derived] section its entries are checked against the
/// recomputed values (1e-9 relative).
CameraConfig load_camera_config(const std::string& path);
CameraConfig parse_camera_config(const std::string& text);

std::string serialize_camera_config(const CameraConfig& cfg);
void save_camera_config(const CameraConfig& cfg, const std::string& path);

} // namespace blade
