#pragma once

#include "blade/core/types.h"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blade {

/// Procedural texture over object-local coordinates [mm], values in [0, 1].
struct Texture
{
	enum class Kind { uniform, checker, noise, gradient };
	Kind kind = Kind::uniform;
	double scale = 10.0;   ///< feature size [mm]
	double value = 0.5;    ///< uniform level
	std::uint64_t seed = 1;

	double at(double u, double v) const;
};

struct SceneObject
{
	enum class Kind { plane, checkerboard, box };
	Kind kind = Kind::plane;
	Rigid pose;              ///< object -> camera frame
	double size_x = 100.0;   ///< plane extents [mm]
	double size_y = 100.0;
	P3D dims{20.0, 20.0, 20.0};      ///< box half extents are dims / 2
	std::size_t corners_x = 5;       ///< checkerboard interior corner grid
	std::size_t corners_y = 4;
	double square = 10.0;            ///< checkerboard square size [mm]
	Texture texture;

	/// Interior corner positions in the camera frame (checkerboard only), row-major.
	std::vector<P3D> corner_points() const;
};

struct Scene
{
	std::vector<SceneObject> objects;
	double background_depth = 3000.0; ///< fronto-planar backdrop [mm]
	Texture background;

	struct Hit
	{
		double t = 0.0;
		P3D point;
		double radiance = 0.0;
	};

	/// Nearest intersection along origin + t * dir (t > epsilon); the backdrop always hits.
	std::optional<Hit> intersect(const P3D& origin, const P3D& dir) const;

	/// First checkerboard object, if any.
	const SceneObject* checkerboard() const;
};

Scene load_scene(const std::string& path);
Scene parse_scene(const std::string& text);
void save_scene(const Scene& scene, const std::string& path);

} // namespace blade
