#pragma once

#include "blade/depth/image.h"
#include "blade/model/camera.h"
#include "blade/sim/scene.h"

#include <cstdint>
#include <vector>

namespace blade {

enum class ApertureMode
{
	pinhole, ///< one chief ray per pixel, no aperture blocking (ideal thin-lens model)
	full     ///< aperture disk sampling; rays missing the main lens stop are blocked
};

enum class PsfMode
{
	none,    ///< geometric rays only
	gaussian ///< pinhole render, then per-micro-image Gaussian blur of sigma = kappa |rho(v)|
};

struct RenderSettings
{
	ApertureMode aperture = ApertureMode::pinhole;
	PsfMode psf = PsfMode::none;
	int rays = 64;            ///< aperture samples per pixel in full mode
	double noise_sigma = 0.0; ///< additive Gaussian noise on the normalized intensity
	std::uint64_t seed = 1;

	void check() const; ///< throws std::invalid_argument on malformed settings
};

struct GroundTruth
{
	std::size_t width = 0, height = 0;    ///< sensor dims
	std::size_t cols = 0, rows = 0;       ///< micro-lens grid dims
	std::vector<float> z;                 ///< per-pixel metric depth, 0 when invalid
	std::vector<float> v;                 ///< per-pixel virtual depth
	std::vector<std::uint8_t> valid;      ///< per-pixel validity
	std::vector<P3D> points;              ///< per-pixel chief-ray hit, camera frame
	std::vector<float> v_coarse;          ///< per-micro-image virtual depth (at the center)
	std::vector<float> z_coarse;
	std::vector<std::uint8_t> valid_coarse;

	double z_at(std::size_t x, std::size_t y) const { return z[y * width + x]; }
	double v_at(std::size_t x, std::size_t y) const { return v[y * width + x]; }
};

struct RenderResult
{
	ImageF raw;
	GroundTruth gt;
};

/// Trace the raw plenoptic image of the scene. Distortion must be zero; the renderer
/// realizes the undistorted projection chain exactly.
RenderResult render(const Scene& scene, const CameraConfig& cfg, const RenderSettings& settings);

} // namespace blade
