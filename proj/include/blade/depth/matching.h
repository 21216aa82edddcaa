#pragma once

#include "blade/depth/image.h"
#include "blade/model/projection.h"

#include <optional>
#include <vector>

namespace blade {

enum class BlurMode { blur_aware, disparity_only };
enum class EstimationMode { coarse, refined };

struct EstimatorSettings
{
	double texture_threshold = 5.0;   ///< t_c, on the 8-bit intensity scale
	double mask_border = 1.5;         ///< b [pixel]
	double search_half_width = 1.96;  ///< N, refinement interval half width in virtual depth
	int window = 5;                   ///< refined-mode window size [pixel], odd
	double gss_tolerance = 1e-3;      ///< termination width on v
	DisparityMode disparity_mode = DisparityMode::corrected;
	BlurMode blur_mode = BlurMode::blur_aware;
	EstimationMode mode = EstimationMode::coarse;
	int max_rings = 2;                ///< neighborhood extent in lens rings
	double v_min = 0.0;               ///< 0 derives 1 + v_margin
	double v_max = 0.0;               ///< 0 derives from the minimum resolvable disparity
	double min_disparity = 0.25;      ///< [pixel], sets the derived v_max
	double v_margin = 0.05;
	double scan_step_px = 0.5;        ///< initialization scan step, in disparity pixels

	void check() const; ///< throws std::invalid_argument on malformed settings
};

/// Binary circular mask: 1 inside radius - border around the center, sampled at
/// integer pixel centers of a window anchored at (x0, y0).
ImageF circular_mask(const P2D& center, double radius, double border,
                     std::size_t width, std::size_t height, long x0 = 0, long y0 = 0);

/// output(p) = img(p + shift), bilinear, out-of-source pixels set to 0.
ImageF warp(const ImageF& img, const P2D& shift);

/// Equally-defocused image via the S-Transform: I + sigma^2 / 4 * laplacian(I).
ImageF equalize_blur(const ImageF& img, double sigma);

/// One micro-image of the raw array.
struct MicroImageView
{
	std::size_t k = 0, l = 0;
	std::size_t type = 0;
	P2D center;      ///< [pixel]
	double radius = 0.0;
};

/// Pair similarity outcome; empty when the views do not overlap at the hypothesis.
using Similarity = std::optional<double>;

/// Matching engine bound to one raw image; caches the Laplacian for blur equalization.
class Matcher
{
public:
	Matcher(const ImageF& raw, const CameraConfig& cfg, const MiaLayout& mia,
	        const EstimatorSettings& settings);

	MicroImageView view(std::size_t k, std::size_t l) const;

	/// Normalized masked SAD between the reference and the blur-equalized, warped
	/// target at virtual depth v (Eq. over the full micro-image).
	Similarity similarity_error(const MicroImageView& ref, const MicroImageView& tgt, double v) const;

	/// Windowed variant around raw pixel p (refined mode).
	Similarity similarity_error_at(const MicroImageView& ref, const MicroImageView& tgt,
	                               double v, const P2D& p) const;

	/// Micro-images expected to share content with (k, l) at virtual depth v:
	/// within max_rings and with |disparity| < 2 (radius - border).
	std::vector<MicroImageView> neighborhood(std::size_t k, std::size_t l, double v,
	                                         bool same_type_only) const;

	/// Constant-weight cost over the neighborhood; empty when no pair overlaps.
	Similarity cost(const MicroImageView& ref, double v, bool same_type_only) const;
	Similarity cost_at(const MicroImageView& ref, double v, bool same_type_only, const P2D& p) const;

	/// Population standard deviation of the masked micro-image, 8-bit scale.
	double texture_std(const MicroImageView& ref) const;
	/// Same over the masked window around p.
	double texture_std_at(const MicroImageView& ref, const P2D& p) const;

	double usable_radius() const { return usable_radius_; }
	const EstimatorSettings& settings() const { return settings_; }
	const CameraConfig& config() const { return *cfg_; }
	const MiaLayout& mia() const { return *mia_; }
	const ImageF& raw() const { return *raw_; }

private:
	struct PairGeometry
	{
		P2D raw_shift;   ///< target sample offset in sensor coordinates
		P2D disp;        ///< micro-image space disparity
		double sigma_r = 0.0;
		bool blur_target = true;
	};

	PairGeometry pair_geometry(const MicroImageView& ref, const MicroImageView& tgt, double v) const;

	double sample_target(const MicroImageView& tgt, const P2D& q, double sigma, bool blurred) const;
	double sample_reference(const P2D& p, double sigma, bool blurred) const;

	const ImageF* raw_;
	const CameraConfig* cfg_;
	const MiaLayout* mia_;
	EstimatorSettings settings_;
	ImageF laplacian_;
	double usable_radius_;
};

} // namespace blade
