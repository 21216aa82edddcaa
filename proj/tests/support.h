#pragma once

#include "blade/model/camera.h"

#include <cstddef>

namespace blade::testing {

/// Raytrix R12-style camera, 50 mm main lens focused at 2133 mm, full-size sensor.
/// Values match the calibrated setup shipped in data/r12e.cfg.
inline CameraConfig r12e_config()
{
	CameraConfig cfg;
	cfg.main_lens.focal = 50.119473840049658;
	cfg.main_lens.u0 = 1722.5;
	cfg.main_lens.v0 = 1843.6;
	cfg.main_lens.aperture = 2.4;

	cfg.distortion = {-6.823267739500167e-05, 4.075030150045897e-07, -4.6632026538200404e-10,
	                  2.0749099670679748e-04, -1.112802972890747e-04};

	cfg.mla.cols = 176;
	cfg.mla.rows = 152;
	cfg.mla.pitch = 0.12744587661565038;
	cfg.mla.dist_main = 50.585393236494191;
	cfg.mla.dist_sensor = 0.34086576314657435;
	cfg.mla.tx = -12.875897977038225;
	cfg.mla.ty = -6.6156396317421127;
	cfg.mla.theta_x = -441.6006983826283e-6;
	cfg.mla.theta_y = 289.22001690936499e-6;
	cfg.mla.theta_z = 37.55805135840533e-6;
	cfg.mla.type_count = 3;

	cfg.types.resize(3);
	cfg.types[0].focal = 0.60158440220844223;
	cfg.types[1].focal = 0.56218757048775958;
	cfg.types[2].focal = 0.58353736817049551;

	cfg.sensor.width = 4080;
	cfg.sensor.height = 3068;
	cfg.sensor.pixel_size = 0.0055;

	cfg.blur.kappa = 1.0201626906564538;

	cfg.update_derived();
	return cfg;
}

/// Same optics with a small sensor and micro-lens grid, axis-centered MLA, zero
/// distortion and tilt. Keeps simulation and estimation affordable in tests.
inline CameraConfig desk_config(std::size_t cols = 33, std::size_t rows = 28,
                                std::size_t width = 784, std::size_t height = 572)
{
	CameraConfig cfg = r12e_config();
	cfg.distortion = {};
	cfg.mla.cols = cols;
	cfg.mla.rows = rows;
	cfg.mla.theta_x = cfg.mla.theta_y = cfg.mla.theta_z = 0.0;
	cfg.sensor.width = width;
	cfg.sensor.height = height;
	cfg.main_lens.u0 = static_cast<double>(width) / 2.0;
	cfg.main_lens.v0 = static_cast<double>(height) / 2.0;

	// put the central lens exactly on the optical axis (central row is even, no half shift)
	const P3D mid = cfg.mla.node(cols / 2, (rows / 2) & ~std::size_t{1});
	cfg.mla.tx = -mid.x();
	cfg.mla.ty = -mid.y();

	// f-number matching: the main lens image-side cone equals the micro-lens cone,
	// (D + d) / 2R = d / B
	const double matched_radius =
		cfg.mla.diameter() * (cfg.mla.dist_main + cfg.mla.dist_sensor) / (2.0 * cfg.mla.dist_sensor);
	cfg.main_lens.aperture = cfg.main_lens.focal / (2.0 * matched_radius);

	cfg.update_derived();
	return cfg;
}

} // namespace blade::testing
