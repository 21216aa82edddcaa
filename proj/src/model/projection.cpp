#include "blade/model/projection.h"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace blade {

P3D distort(const DistortionParams& d, const P3D& p)
{
	const double x = p.x(), y = p.y();
	const double s2 = x * x + y * y;
	const double radial = 1.0 + d.q1 * s2 + d.q2 * s2 * s2 + d.q3 * s2 * s2 * s2;
	return {
		x * radial + d.p1 * (s2 + 2.0 * x * x) + 2.0 * d.p2 * x * y,
		y * radial + d.p2 * (s2 + 2.0 * y * y) + 2.0 * d.p1 * x * y,
		p.z()};
}

ProjectionResult project(const CameraConfig& cfg, const P3D& p_world, std::size_t k, std::size_t l)
{
	const P3D p_cam = cfg.world_pose(p_world);
	if (not (p_cam.z() > 0.0))
		throw std::domain_error("project: point behind the main lens");
	if (not (p_cam.z() > cfg.main_lens.focal))
		throw std::domain_error("project: point inside the main lens focal distance");

	// main lens, then lateral distortion in the virtual intermediate space
	const P3D p_virtual = distort(cfg.distortion, thin_lens_image(cfg.main_lens.focal, p_cam));

	// express in the micro-lens frame and re-image through the micro-lens
	const Rigid cam_from_lens = cfg.lens_pose(k, l);
	const P3D p_mu = cam_from_lens.inverse()(p_virtual);
	const std::size_t type = cfg.mla.type_of(k, l);
	const double f_i = cfg.types[type].focal;
	const P3D p_img = thin_lens_image(f_i, p_mu);

	const double d = cfg.mla.dist_sensor;
	const double v = -p_mu.z() / d;

	// through-center projection onto the sensor plane of the micro-lens frame
	const double t = -d / p_img.z();
	const P2D hit_mu{p_img.x() * t, p_img.y() * t};

	// signed circle of confusion radius, (B / 2s) * (1 + d / z'')
	const double rho = (cfg.mla.diameter() / (2.0 * cfg.sensor.pixel_size)) * (1.0 + d / p_img.z());

	// sensor hit expressed in camera frame, then in pixels about the principal point
	const P3D hit_cam = cam_from_lens(P3D{hit_mu.x(), hit_mu.y(), -d});

	ProjectionResult res;
	res.feature.u = cfg.main_lens.u0 + hit_cam.x() / cfg.sensor.pixel_size;
	res.feature.v = cfg.main_lens.v0 + hit_cam.y() / cfg.sensor.pixel_size;
	res.feature.rho = rho;
	res.feature.k = k;
	res.feature.l = l;
	res.feature.type = type;
	res.virtual_depth = v;
	res.on_sensor =
		res.feature.u >= 0.0 and res.feature.u < static_cast<double>(cfg.sensor.width) and
		res.feature.v >= 0.0 and res.feature.v < static_cast<double>(cfg.sensor.height);
	return res;
}

P3D back_project(const CameraConfig& cfg, const BapFeature& feat)
{
	const std::size_t type = feat.type;
	if (std::abs(feat.rho - cfg.types[type].q) < 1e-15)
		throw std::domain_error("back_project: rho = q_i, virtual depth at infinity");
	const double v = blur_to_virtual_depth(cfg, feat.rho, type);
	if (v == 0.0)
		throw std::domain_error("back_project: null virtual depth");

	const double s = cfg.sensor.pixel_size;
	const double d = cfg.mla.dist_sensor;
	const Rigid cam_from_lens = cfg.lens_pose(feat.k, feat.l);

	// sensor hit in camera frame laterals; recover the micro-lens frame position on
	// the plane z = -d by solving the 2x2 lateral block of the lens pose
	const P2D hit_cam{(feat.u - cfg.main_lens.u0) * s, (feat.v - cfg.main_lens.v0) * s};
	const P3D base = cam_from_lens(P3D{0.0, 0.0, -d});
	Eigen::Matrix2d lat = cam_from_lens.rotation.topLeftCorner<2, 2>();
	const P2D hit_mu = lat.inverse() * (hit_cam - base.head<2>());

	// chief ray through the micro-lens center: virtual point = v * (hit, -d)
	const P3D p_mu{hit_mu.x() * v, hit_mu.y() * v, -v * d};
	const P3D p_virtual = cam_from_lens(p_mu);
	const P3D p_cam = thin_lens_object(cfg.main_lens.focal, undistort(cfg.inv_distortion, p_virtual));
	return cfg.world_pose.inverse()(p_cam);
}

P3D apply_scale(const CameraConfig& cfg, const P3D& p)
{
	if (cfg.scale.kind == ScaleKind::identity) return p;
	if (p.z() == 0.0) throw std::domain_error("apply_scale: z = 0");
	return p * (cfg.scale.gamma_of(p.z()) / p.z());
}

RelativeBlurCoeffs relative_blur_coeffs(const CameraConfig& cfg, std::size_t i, std::size_t j)
{
	const double B = cfg.mla.diameter();
	const double d = cfg.mla.dist_sensor;
	const double ai = 1.0 / cfg.types[i].a0;
	const double aj = 1.0 / cfg.types[j].a0;
	return {
		(B * B * d / 2.0) * (ai - aj),
		(B * B * d * d / 4.0) * (ai * ai - aj * aj)};
}

RelativeBlur relative_blur_sigma(const CameraConfig& cfg, double v, std::size_t i, std::size_t j)
{
	if (v == 0.0) throw std::domain_error("relative_blur_sigma: null virtual depth");
	const double dr2 = relative_blur_coeffs(cfg, i, j).delta_r2(v);
	RelativeBlur rb;
	rb.sigma = cfg.blur.kappa / cfg.sensor.pixel_size * std::sqrt(std::abs(dr2));
	rb.second_sharper = dr2 >= 0.0; // image (i) at least as blurred as (j)
	return rb;
}

P2D disparity(const MiaLayout& mia, std::size_t ref_k, std::size_t ref_l,
              std::size_t tgt_k, std::size_t tgt_l, double v, DisparityMode mode)
{
	if (v == 0.0) throw std::domain_error("disparity: null virtual depth");
	const P2D baseline = mia.center(tgt_k, tgt_l) - mia.center(ref_k, ref_l); // B' [pixel]
	if (mode == DisparityMode::approximate)
		return baseline / (mia.lambda * v); // B / v with B = B' / lambda
	return baseline * (((1.0 - mia.lambda) * v + mia.lambda) / v);
}

DisparityApproximationCheck check_disparity_approximation(const CameraConfig& cfg, double alpha, int n)
{
	const double d = cfg.mla.dist_sensor;
	const double B = d / 2.0; // bounding diameter used in the derivation
	const double a = 2.0 * n * d;
	const double dz = n * B * alpha;
	const double v = a / d;
	const double vp = (a + dz) / (d + dz);

	DisparityApproximationCheck res;
	res.direct = std::abs(1.0 - v / vp);
	res.closed_form = std::abs(alpha / 2.0 - n * alpha) / (2.0 + alpha / 2.0);
	return res;
}

} // namespace blade
