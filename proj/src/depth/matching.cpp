#include "blade/depth/matching.h"

#include <cmath>
#include <stdexcept>

namespace blade {

void EstimatorSettings::check() const
{
	if (texture_threshold < 0.0) throw std::invalid_argument("settings: t_c must be >= 0");
	if (mask_border < 0.0) throw std::invalid_argument("settings: mask border must be >= 0");
	if (window < 1 or window % 2 == 0) throw std::invalid_argument("settings: window must be odd");
	if (gss_tolerance <= 0.0) throw std::invalid_argument("settings: gss tolerance must be > 0");
	if (search_half_width <= 0.0) throw std::invalid_argument("settings: search half width must be > 0");
	if (max_rings < 1) throw std::invalid_argument("settings: max_rings must be >= 1");
}

ImageF circular_mask(const P2D& center, double radius, double border,
                     std::size_t width, std::size_t height, long x0, long y0)
{
	if (not (radius > border)) throw std::invalid_argument("circular_mask: radius must exceed border");
	ImageF mask(width, height);
	const double r = radius - border;
	const double r2 = r * r;
	for (std::size_t y = 0; y < height; ++y)
		for (std::size_t x = 0; x < width; ++x)
		{
			const double dx = static_cast<double>(static_cast<long>(x) + x0) - center.x();
			const double dy = static_cast<double>(static_cast<long>(y) + y0) - center.y();
			mask(x, y) = (dx * dx + dy * dy <= r2) ? 1.f : 0.f;
		}
	return mask;
}

ImageF warp(const ImageF& img, const P2D& shift)
{
	if (not std::isfinite(shift.x()) or not std::isfinite(shift.y()))
		throw std::invalid_argument("warp: non-finite shift");
	ImageF out(img.width(), img.height());
	for (std::size_t y = 0; y < img.height(); ++y)
		for (std::size_t x = 0; x < img.width(); ++x)
			out(x, y) = img.sample(static_cast<double>(x) + shift.x(),
			                       static_cast<double>(y) + shift.y(), 0.f);
	return out;
}

ImageF equalize_blur(const ImageF& img, double sigma)
{
	if (sigma < 0.0) throw std::invalid_argument("equalize_blur: sigma must be >= 0");
	if (sigma == 0.0) return img;
	const ImageF lap = laplacian(img);
	ImageF out(img.width(), img.height());
	const float gain = static_cast<float>(sigma * sigma / 4.0);
	for (std::size_t i = 0; i < img.data().size(); ++i)
		out.data()[i] = img.data()[i] + gain * lap.data()[i];
	return out;
}

// ---------------------------------------------------------------------------
// Matcher
// ---------------------------------------------------------------------------

Matcher::Matcher(const ImageF& raw, const CameraConfig& cfg, const MiaLayout& mia,
                 const EstimatorSettings& settings)
: raw_{&raw}, cfg_{&cfg}, mia_{&mia}, settings_{settings},
  laplacian_{laplacian(raw)},
  usable_radius_{mia.radius - settings.mask_border}
{
	settings.check();
	if (not (usable_radius_ > 0.0))
		throw std::invalid_argument("matcher: mask border leaves no usable micro-image area");
}

MicroImageView Matcher::view(std::size_t k, std::size_t l) const
{
	return {k, l, cfg_->mla.type_of(k, l), mia_->center(k, l), mia_->radius};
}

Matcher::PairGeometry Matcher::pair_geometry(const MicroImageView& ref, const MicroImageView& tgt,
                                             double v) const
{
	PairGeometry g;
	g.disp = disparity(*mia_, ref.k, ref.l, tgt.k, tgt.l, v, settings_.disparity_mode);
	const P2D baseline = mia_->center(tgt.k, tgt.l) - mia_->center(ref.k, ref.l);
	g.raw_shift = baseline - g.disp;
	if (settings_.blur_mode == BlurMode::blur_aware and ref.type != tgt.type)
	{
		const RelativeBlur rb = relative_blur_sigma(*cfg_, v, ref.type, tgt.type);
		g.sigma_r = rb.sigma;
		g.blur_target = rb.second_sharper; // extra blur goes to the relatively in-focus image
	}
	return g;
}

double Matcher::sample_target(const MicroImageView&, const P2D& q, double sigma, bool blurred) const
{
	const double base = raw_->sample(q.x(), q.y(), 0.f);
	if (not blurred or sigma == 0.0) return base;
	return base + sigma * sigma / 4.0 * laplacian_.sample(q.x(), q.y(), 0.f);
}

double Matcher::sample_reference(const P2D& p, double sigma, bool blurred) const
{
	const std::size_t x = static_cast<std::size_t>(p.x());
	const std::size_t y = static_cast<std::size_t>(p.y());
	const double base = (*raw_)(x, y);
	if (not blurred or sigma == 0.0) return base;
	return base + sigma * sigma / 4.0 * laplacian_(x, y);
}

Similarity Matcher::similarity_error(const MicroImageView& ref, const MicroImageView& tgt,
                                     double v) const
{
	if (ref.k == tgt.k and ref.l == tgt.l)
		throw std::invalid_argument("similarity_error: reference and target must differ");

	const PairGeometry g = pair_geometry(ref, tgt, v);
	const double r = usable_radius_;
	const double r2 = r * r;

	const long x_lo = std::max(0l, static_cast<long>(std::floor(ref.center.x() - r)));
	const long x_hi = std::min(static_cast<long>(raw_->width()) - 1,
	                           static_cast<long>(std::ceil(ref.center.x() + r)));
	const long y_lo = std::max(0l, static_cast<long>(std::floor(ref.center.y() - r)));
	const long y_hi = std::min(static_cast<long>(raw_->height()) - 1,
	                           static_cast<long>(std::ceil(ref.center.y() + r)));

	double num = 0.0;
	std::size_t count = 0;
	for (long y = y_lo; y <= y_hi; ++y)
	{
		for (long x = x_lo; x <= x_hi; ++x)
		{
			const P2D p{static_cast<double>(x), static_cast<double>(y)};
			if ((p - ref.center).squaredNorm() > r2) continue;
			const P2D q = p + g.raw_shift;
			if ((q - tgt.center).squaredNorm() > r2) continue;
			const double a = sample_reference(p, g.sigma_r, not g.blur_target);
			const double b = sample_target(tgt, q, g.sigma_r, g.blur_target);
			num += std::abs(a - b);
			++count;
		}
	}
	if (count == 0) return std::nullopt;
	return num / static_cast<double>(count);
}

Similarity Matcher::similarity_error_at(const MicroImageView& ref, const MicroImageView& tgt,
                                        double v, const P2D& p0) const
{
	const PairGeometry g = pair_geometry(ref, tgt, v);
	const double r2 = usable_radius_ * usable_radius_;
	const long hw = settings_.window / 2;

	double num = 0.0;
	std::size_t count = 0;
	for (long wy = -hw; wy <= hw; ++wy)
	{
		for (long wx = -hw; wx <= hw; ++wx)
		{
			const P2D p{p0.x() + static_cast<double>(wx), p0.y() + static_cast<double>(wy)};
			if (p.x() < 0 or p.y() < 0 or p.x() > raw_->width() - 1.0 or p.y() > raw_->height() - 1.0)
				continue;
			if ((p - ref.center).squaredNorm() > r2) continue;
			const P2D q = p + g.raw_shift;
			if ((q - tgt.center).squaredNorm() > r2) continue;
			const double a = sample_reference(p, g.sigma_r, not g.blur_target);
			const double b = sample_target(tgt, q, g.sigma_r, g.blur_target);
			num += std::abs(a - b);
			++count;
		}
	}
	if (count == 0) return std::nullopt;
	return num / static_cast<double>(count);
}

std::vector<MicroImageView> Matcher::neighborhood(std::size_t k, std::size_t l, double v,
                                                  bool same_type_only) const
{
	std::vector<MicroImageView> out;
	const long range = settings_.max_rings + 1;
	// hexagonal ring R peaks at R * pitch; ring R+1 starts at 0.866 (R+1) * pitch
	const double max_center_dist = (static_cast<double>(settings_.max_rings) + 0.05) * mia_->pitch_px;
	const double overlap_limit = 2.0 * usable_radius_;
	const std::size_t ref_type = cfg_->mla.type_of(k, l);
	const P2D ref_center = mia_->center(k, l);

	for (long dl = -range; dl <= range; ++dl)
	{
		for (long dk = -range; dk <= range; ++dk)
		{
			if (dk == 0 and dl == 0) continue;
			const long nk = static_cast<long>(k) + dk;
			const long nl = static_cast<long>(l) + dl;
			if (not cfg_->mla.in_grid(nk, nl)) continue;
			const std::size_t uk = static_cast<std::size_t>(nk);
			const std::size_t ul = static_cast<std::size_t>(nl);
			if (same_type_only and cfg_->mla.type_of(uk, ul) != ref_type) continue;
			if ((mia_->center(uk, ul) - ref_center).norm() > max_center_dist) continue;
			const P2D d = disparity(*mia_, k, l, uk, ul, v, settings_.disparity_mode);
			if (d.norm() >= overlap_limit) continue;
			out.push_back(view(uk, ul));
		}
	}
	return out;
}

Similarity Matcher::cost(const MicroImageView& ref, double v, bool same_type_only) const
{
	const auto neighbors = neighborhood(ref.k, ref.l, v, same_type_only);
	double sum = 0.0;
	std::size_t used = 0;
	for (const auto& tgt : neighbors)
	{
		if (const auto e = similarity_error(ref, tgt, v))
		{
			sum += *e;
			++used;
		}
	}
	if (used == 0) return std::nullopt;
	return sum / static_cast<double>(used);
}

Similarity Matcher::cost_at(const MicroImageView& ref, double v, bool same_type_only,
                            const P2D& p) const
{
	const auto neighbors = neighborhood(ref.k, ref.l, v, same_type_only);
	double sum = 0.0;
	std::size_t used = 0;
	for (const auto& tgt : neighbors)
	{
		if (const auto e = similarity_error_at(ref, tgt, v, p))
		{
			sum += *e;
			++used;
		}
	}
	if (used == 0) return std::nullopt;
	return sum / static_cast<double>(used);
}

double Matcher::texture_std(const MicroImageView& ref) const
{
	const double r = usable_radius_;
	const double r2 = r * r;
	const long x_lo = std::max(0l, static_cast<long>(std::floor(ref.center.x() - r)));
	const long x_hi = std::min(static_cast<long>(raw_->width()) - 1,
	                           static_cast<long>(std::ceil(ref.center.x() + r)));
	const long y_lo = std::max(0l, static_cast<long>(std::floor(ref.center.y() - r)));
	const long y_hi = std::min(static_cast<long>(raw_->height()) - 1,
	                           static_cast<long>(std::ceil(ref.center.y() + r)));

	double sum = 0.0, sum2 = 0.0;
	std::size_t count = 0;
	for (long y = y_lo; y <= y_hi; ++y)
		for (long x = x_lo; x <= x_hi; ++x)
		{
			const P2D p{static_cast<double>(x), static_cast<double>(y)};
			if ((p - ref.center).squaredNorm() > r2) continue;
			const double val = (*raw_)(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
			sum += val;
			sum2 += val * val;
			++count;
		}
	if (count == 0) return 0.0;
	const double mean = sum / static_cast<double>(count);
	const double var = std::max(0.0, sum2 / static_cast<double>(count) - mean * mean);
	return 255.0 * std::sqrt(var);
}

double Matcher::texture_std_at(const MicroImageView& ref, const P2D& p0) const
{
	const double r2 = usable_radius_ * usable_radius_;
	const long hw = settings_.window / 2;
	double sum = 0.0, sum2 = 0.0;
	std::size_t count = 0;
	for (long wy = -hw; wy <= hw; ++wy)
		for (long wx = -hw; wx <= hw; ++wx)
		{
			const double x = p0.x() + static_cast<double>(wx);
			const double y = p0.y() + static_cast<double>(wy);
			if (x < 0 or y < 0 or x > raw_->width() - 1.0 or y > raw_->height() - 1.0) continue;
			const P2D p{x, y};
			if ((p - ref.center).squaredNorm() > r2) continue;
			const double val = (*raw_)(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
			sum += val;
			sum2 += val * val;
			++count;
		}
	if (count == 0) return 0.0;
	const double mean = sum / static_cast<double>(count);
	const double var = std::max(0.0, sum2 / static_cast<double>(count) - mean * mean);
	return 255.0 * std::sqrt(var);
}

} // namespace blade
