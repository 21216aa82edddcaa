#pragma once

#include "blade/calib/extrinsics.h"
#include "blade/calib/scale.h"

#include <string>
#include <vector>

namespace blade {

// Observation files: one [frame.N] section per frame with `grid = cols rows spacing`
// and optional `z = ...`, then [frame.N.cluster.M] sections holding repeated
// `obs = u v rho k l i` lines (type index i is 1-based in files).
std::vector<ScaleObservation> load_observations(const std::string& path);
void save_observations(const std::vector<ScaleObservation>& observations, const std::string& path);

// Constellation files: [target.N] sections with `point = x y z` and `obs = ...` lines.
PointConstellation load_constellation(const std::string& path);
void save_constellation(const PointConstellation& constellation, const std::string& path);

} // namespace blade
