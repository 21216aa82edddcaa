#include "blade/model/camera.h"

#include <cmath>
#include <sstream>

namespace blade {

void CameraConfig::update_derived()
{
	const double s = sensor.pixel_size;
	const double d = mla.dist_sensor;
	const double B = mla.diameter();

	lambda = mla.dist_main / (mla.dist_main + d);
	m = -B / (2.0 * s);

	for (auto& t : types)
	{
		t.a0 = d * t.focal / (d - t.focal);
		t.q = (B / (2.0 * s)) * (1.0 - d / t.focal); // = -(B d / 2 s) / a0
		t.focus_v = -t.a0 / d;
	}
}

void CameraConfig::validate() const
{
	auto fail = [](const std::string& msg) { throw std::invalid_argument("camera config: " + msg); };

	if (not (main_lens.focal > 0.0)) fail("main lens focal must be positive");
	if (not (main_lens.aperture > 0.0)) fail("aperture must be positive");
	if (not (mla.dist_main > 0.0)) fail("D must be positive");
	if (not (mla.dist_sensor > 0.0)) fail("d must be positive");
	if (not (mla.pitch > 0.0)) fail("pitch must be positive");
	if (mla.cols == 0 or mla.rows == 0) fail("empty micro-lens grid");
	if (types.size() != mla.type_count) fail("type list does not match mla.type_count");
	for (const auto& t : types)
		if (not (t.focal > 0.0)) fail("micro-lens focal must be positive");
	if (sensor.width == 0 or sensor.height == 0) fail("empty sensor");
	if (not (sensor.pixel_size > 0.0)) fail("pixel size must be positive");
	if (not (blur.kappa > 0.0)) fail("kappa must be positive");
	if (scale.kind == ScaleKind::identity and not scale.is_identity())
		fail("identity scale model requires (gamma2, gamma1, gamma0) = (0, 1, 0)");
	if (not (lambda > 0.0 and lambda < 1.0)) fail("lambda out of (0, 1)");

	// derived coefficients consistent with primaries
	CameraConfig fresh = *this;
	fresh.update_derived();
	auto check = [&](double stored, double recomputed, const char* name) {
		if (not nearly_equal(stored, recomputed, 1e-9, 1e-12))
		{
			std::ostringstream os;
			os << "derived coefficient " << name << " inconsistent: stored " << stored
			   << " vs recomputed " << recomputed;
			fail(os.str());
		}
	};
	check(m, fresh.m, "m");
	check(lambda, fresh.lambda, "lambda");
	for (std::size_t i = 0; i < types.size(); ++i)
	{
		check(types[i].q, fresh.types[i].q, "q_i");
		check(types[i].a0, fresh.types[i].a0, "a0_i");
	}
}

MiaLayout CameraConfig::mia() const
{
	MiaLayout mia;
	mia.cols = mla.cols;
	mia.rows = mla.rows;
	mia.lambda = lambda;
	mia.radius = mla.diameter() / (2.0 * lambda * sensor.pixel_size);
	mia.pitch_px = mla.pitch / (lambda * sensor.pixel_size);
	mia.centers.resize(mla.cols * mla.rows);

	const Rigid pose = mla_pose();
	const double zs = mla.dist_main + mla.dist_sensor; // sensor plane depth behind the main lens
	for (std::size_t l = 0; l < mla.rows; ++l)
	{
		for (std::size_t k = 0; k < mla.cols; ++k)
		{
			// chief ray through the main lens center and the micro-lens center
			const P3D c = pose(mla.node(k, l));
			const double t = zs / -c.z();
			mia.centers[l * mla.cols + k] = P2D{
				main_lens.u0 + t * c.x() / sensor.pixel_size,
				main_lens.v0 + t * c.y() / sensor.pixel_size};
		}
	}
	return mia;
}

bool MiaLayout::lens_of_pixel(const P2D& p, std::size_t& k, std::size_t& l) const
{
	if (centers.empty()) return false;

	// hexagonal inverse lookup: estimate the row from the vertical spacing, then
	// check the best candidates in the two nearest rows
	const double row_pitch = pitch_px * 0.8660254037844386467637232;
	const double y0 = centers[0].y();
	const double x0 = centers[0].x();

	double best = std::numeric_limits<double>::max();
	const long lc = std::lround((p.y() - y0) / row_pitch);
	for (long dl = -1; dl <= 1; ++dl)
	{
		const long ll = lc + dl;
		if (ll < 0 or ll >= static_cast<long>(rows)) continue;
		const double xoff = 0.5 * pitch_px * static_cast<double>(ll % 2);
		const long kc = std::lround((p.x() - x0 - xoff) / pitch_px);
		for (long dk = -1; dk <= 1; ++dk)
		{
			const long kk = kc + dk;
			if (kk < 0 or kk >= static_cast<long>(cols)) continue;
			const double d2 = (center(kk, ll) - p).squaredNorm();
			if (d2 < best)
			{
				best = d2;
				k = static_cast<std::size_t>(kk);
				l = static_cast<std::size_t>(ll);
			}
		}
	}
	return best <= radius * radius;
}

} // namespace blade
