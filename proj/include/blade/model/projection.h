#pragma once

#include "blade/model/camera.h"

#include <optional>

namespace blade {

// ---------------------------------------------------------------------------
// distortion
// ---------------------------------------------------------------------------

/// Brown model on the lateral components of a virtual-space point; z is unchanged.
P3D distort(const DistortionParams& d, const P3D& p);

/// Same functional form evaluated with the inverse coefficients.
inline P3D undistort(const InverseDistortionParams& d, const P3D& p) { return distort(d, p); }

// ---------------------------------------------------------------------------
// thin lens maps
// ---------------------------------------------------------------------------

/// Image of a point through a thin lens at the frame origin looking along +z.
/// Objects in front have z > 0 and image at z' = z f / (f - z) < 0 when z > f.
inline P3D thin_lens_image(double focal, const P3D& p)
{
	return p * (focal / (focal - p.z()));
}

/// Object point whose thin-lens image is p (inverse of thin_lens_image).
inline P3D thin_lens_object(double focal, const P3D& p)
{
	return p * (focal / (focal + p.z()));
}

// ---------------------------------------------------------------------------
// blur / virtual depth conversions (per micro-lens type)
// ---------------------------------------------------------------------------

/// rho = m / v + q_i  [pixel], affine in 1/v.
inline double virtual_depth_to_blur(const CameraConfig& cfg, double v, std::size_t type)
{
	return cfg.m / v + cfg.types[type].q;
}

inline double blur_to_virtual_depth(const CameraConfig& cfg, double rho, std::size_t type)
{
	return cfg.m / (rho - cfg.types[type].q);
}

// ---------------------------------------------------------------------------
// virtual depth <-> metric depth along the optical axis
// ---------------------------------------------------------------------------

/// Object distance in front of the main lens for an axial point of virtual depth v.
inline double v_to_obj(const CameraConfig& cfg, double v)
{
	const double zi = -(cfg.mla.dist_main + v * cfg.mla.dist_sensor); // virtual point depth
	const P3D p = thin_lens_object(cfg.main_lens.focal, P3D{0.0, 0.0, zi});
	return p.z();
}

inline double obj_to_v(const CameraConfig& cfg, double z)
{
	const P3D pi = thin_lens_image(cfg.main_lens.focal, P3D{0.0, 0.0, z});
	return -(pi.z() + cfg.mla.dist_main) / cfg.mla.dist_sensor;
}

// ---------------------------------------------------------------------------
// projection
// ---------------------------------------------------------------------------

struct ProjectionResult
{
	BapFeature feature;
	bool on_sensor = true;     ///< projection falls inside the sensor bounds
	double virtual_depth = 0.0; ///< v of the point as seen by this micro-lens
};

/// Forward blur-aware projection of a world point through micro-lens (k, l).
/// Throws std::domain_error when the point is not in front of the main lens.
ProjectionResult project(const CameraConfig& cfg, const P3D& p_world, std::size_t k, std::size_t l);

/// Inverse projection of a BAP feature into object space, before scale correction.
/// Throws std::domain_error on degenerate blur (rho = q_i) or null virtual depth.
P3D back_project(const CameraConfig& cfg, const BapFeature& feat);

/// Depth scaling correction, Gamma(z)/z applied to all three coordinates.
P3D apply_scale(const CameraConfig& cfg, const P3D& p);

// ---------------------------------------------------------------------------
// relative blur
// ---------------------------------------------------------------------------

/// Coefficients of Delta r^2 = r_i^2 - r_j^2 = m_ij / v + q_ij  [mm^2].
struct RelativeBlurCoeffs
{
	double m_ij = 0.0;
	double q_ij = 0.0;

	double delta_r2(double v) const { return m_ij / v + q_ij; }
};

RelativeBlurCoeffs relative_blur_coeffs(const CameraConfig& cfg, std::size_t i, std::size_t j);

struct RelativeBlur
{
	double sigma = 0.0;        ///< spread of the equalizing kernel [pixel]
	bool second_sharper = true; ///< true when image (j) is the relatively in-focus one
};

/// Spread sigma_r = kappa / s * sqrt(|Delta r^2|) and which image receives the extra blur.
RelativeBlur relative_blur_sigma(const CameraConfig& cfg, double v, std::size_t i, std::size_t j);

// ---------------------------------------------------------------------------
// disparity
// ---------------------------------------------------------------------------

enum class DisparityMode { corrected, approximate };

/// Disparity between the micro-images of refLens and tgtLens at virtual depth v,
/// in micro-image space [pixel]. The corrected form accounts for the micro-image
/// center scaling lambda; the approximate form is kept for the ablation study.
P2D disparity(const MiaLayout& mia, std::size_t ref_k, std::size_t ref_l,
              std::size_t tgt_k, std::size_t tgt_l, double v,
              DisparityMode mode = DisparityMode::corrected);

/// Shift applied to the raw target image so that it aligns with the reference in
/// sensor coordinates: B' - disparity.
inline P2D raw_warp_shift(const MiaLayout& mia, std::size_t ref_k, std::size_t ref_l,
                          std::size_t tgt_k, std::size_t tgt_l, double v,
                          DisparityMode mode = DisparityMode::corrected)
{
	const P2D baseline = mia.center(tgt_k, tgt_l) - mia.center(ref_k, ref_l);
	return baseline - disparity(mia, ref_k, ref_l, tgt_k, tgt_l, v, mode);
}

// ---------------------------------------------------------------------------
// tilt approximation bound
// ---------------------------------------------------------------------------

struct DisparityApproximationCheck
{
	double direct = 0.0;      ///< |1 - v/v'| evaluated from the two expressions
	double closed_form = 0.0; ///< |alpha/2 - n alpha| / (2 + alpha/2)
};

/// Error of neglecting the MLA-tilt z-shift between micro-lenses separated by n pitches.
DisparityApproximationCheck check_disparity_approximation(const CameraConfig& cfg, double alpha, int n);

} // namespace blade
