#pragma once

#include "blade/core/types.h"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace blade {

struct MainLensParams
{
	double focal = 50.0;     ///< F [mm]
	double u0 = 0.0;         ///< principal point [pixel]
	double v0 = 0.0;
	double aperture = 2.4;   ///< f-number

	double aperture_radius() const { return focal / (2.0 * aperture); } // mm
};

/// Brown lateral distortion coefficients, applied in the virtual intermediate space (mm).
struct DistortionParams
{
	double q1 = 0.0, q2 = 0.0, q3 = 0.0; // radial
	double p1 = 0.0, p2 = 0.0;           // tangential

	bool is_null() const { return q1 == 0.0 and q2 == 0.0 and q3 == 0.0 and p1 == 0.0 and p2 == 0.0; }
};

using InverseDistortionParams = DistortionParams; // same Brown form, coefficients Q-1..Q-3, P-1..P-2

struct MicroLensType
{
	double focal = 0.6; ///< f_i [mm]

	// derived, filled by CameraConfig::update_derived()
	double q = 0.0;     ///< blur offset q_i [pixel]
	double a0 = 0.0;    ///< focus plane distance behind the MLA [mm], signed (negative in Galilean setups)
	double focus_v = 0.0; ///< virtual depth at which this type is in focus, -a0/d
};

struct MlaGeometry
{
	std::size_t cols = 0;       ///< K
	std::size_t rows = 0;       ///< L
	double pitch = 0.1;         ///< inter-lens distance [mm]
	double tx = 0.0, ty = 0.0;  ///< MLA frame translation w.r.t. camera frame [mm]
	double theta_x = 0.0, theta_y = 0.0, theta_z = 0.0; ///< MLA rotation [rad]
	double dist_main = 50.0;    ///< D: main lens to MLA [mm]
	double dist_sensor = 0.34;  ///< d: MLA to sensor [mm]
	std::size_t type_count = 1; ///< I
	int type_phase = 0;         ///< cyclic offset of the type pattern
	double lens_diameter = 0.0; ///< B [mm]; 0 means "use pitch"

	double diameter() const { return lens_diameter > 0.0 ? lens_diameter : pitch; }

	/// Micro-lens node position in the MLA frame; hexagonal row-aligned grid,
	/// odd rows shifted by half a pitch.
	P3D node(std::size_t k, std::size_t l) const
	{
		const double x = (static_cast<double>(k) + 0.5 * static_cast<double>(l % 2)) * pitch;
		const double y = static_cast<double>(l) * pitch * 0.8660254037844386467637232; // sin(pi/3)
		return {x, y, 0.0};
	}

	/// Cyclic type assignment. For I = 3 this is the 3-coloring of the triangular
	/// lattice where each type forms a sqrt(3)-pitch hexagonal sub-lattice.
	std::size_t type_of(std::size_t k, std::size_t l) const
	{
		const long I = static_cast<long>(type_count);
		const long q = static_cast<long>(k) - static_cast<long>(l / 2);
		long t = (q - static_cast<long>(l) + type_phase) % I;
		if (t < 0) t += I;
		return static_cast<std::size_t>(t);
	}

	bool in_grid(long k, long l) const
	{
		return k >= 0 and l >= 0 and k < static_cast<long>(cols) and l < static_cast<long>(rows);
	}
};

struct SensorParams
{
	std::size_t width = 0;   ///< [pixel]
	std::size_t height = 0;
	double pixel_size = 0.0055; ///< s [mm/pixel]
};

struct BlurModel
{
	double kappa = 1.0; ///< PSF spread per blur-circle radius
};

enum class ScaleKind { identity, linear, quadratic };

/// Depth scaling polynomial Gamma(z) = g2 z^2 + g1 z + g0, mapping unscaled z to metric depth.
struct ScaleModel
{
	ScaleKind kind = ScaleKind::identity;
	double gamma0 = 0.0;
	double gamma1 = 1.0;
	double gamma2 = 0.0;

	double gamma_of(double z) const { return gamma2 * z * z + gamma1 * z + gamma0; }
	bool is_identity() const { return gamma2 == 0.0 and gamma1 == 1.0 and gamma0 == 0.0; }
};

/// An image observation through micro-lens (k, l): pixel position plus signed defocus blur radius.
struct BapFeature
{
	double u = 0.0;  ///< [pixel]
	double v = 0.0;
	double rho = 0.0; ///< signed blur radius [pixel]
	std::size_t k = 0, l = 0;
	std::size_t type = 0;
};

/// Hexagonal grid of micro-image centers on the sensor.
struct MiaLayout
{
	std::size_t cols = 0, rows = 0;
	std::vector<P2D> centers;   ///< c(k, l) [pixel], row-major
	double radius = 0.0;        ///< micro-image radius [pixel]
	double lambda = 1.0;        ///< center scaling factor D / (D + d)
	double pitch_px = 0.0;      ///< center spacing along a row [pixel]

	const P2D& center(std::size_t k, std::size_t l) const { return centers[l * cols + k]; }

	/// Index of the micro-image whose center is nearest to pixel p, or false when the
	/// pixel lies outside every micro-image disk.
	bool lens_of_pixel(const P2D& p, std::size_t& k, std::size_t& l) const;
};

struct CameraConfig
{
	MainLensParams main_lens;
	DistortionParams distortion;
	InverseDistortionParams inv_distortion;
	MlaGeometry mla;
	std::vector<MicroLensType> types;
	SensorParams sensor;
	BlurModel blur;
	ScaleModel scale;
	Rigid world_pose; ///< camera <- world

	// derived
	double m = 0.0;        ///< blur slope [pixel], shared across types: -B / (2 s)
	double lambda = 1.0;   ///< D / (D + d)

	/// Recompute all derived coefficients (m, q_i, a0_i, lambda) from the stored primaries.
	void update_derived();

	/// Throws std::invalid_argument when an invariant is violated.
	void validate() const;

	Rigid mla_pose() const
	{
		return Rigid::from_euler(mla.theta_x, mla.theta_y, mla.theta_z,
		                         P3D{mla.tx, mla.ty, -mla.dist_main});
	}

	/// camera <- micro-lens (k,l) frame
	Rigid lens_pose(std::size_t k, std::size_t l) const
	{
		Rigid t = mla_pose();
		t.translation = t(mla.node(k, l));
		return t;
	}

	MiaLayout mia() const;
};

} // namespace blade
