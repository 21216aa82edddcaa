#include "blade/sim/export.h"

#include "blade/model/projection.h"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace blade {

namespace {

struct SpotObservation
{
	P2D centroid;
	double weight = 0.0;   ///< fraction of the micro-lens bundle that passed the stop
	double rms_radius = 0.0; ///< blur radius recovered from the spot second moment [pixel]
};

// Observed position of a point through one micro-lens with a real aperture: the
// radiance centroid of its sensor spot. The micro-lens bundle is integrated over a
// deterministic grid; rays blocked at the main lens stop shift the centroid, which
// is the mechanism behind the depth scaling error. The quadrature is identical for
// every lens, so its residual bias cancels across a cluster.
std::optional<SpotObservation> aperture_spot_centroid(const CameraConfig& cfg, const P3D& point,
                                                      std::size_t k, std::size_t l, int rays)
{
	const double ap_r = cfg.main_lens.aperture_radius();
	const Rigid lens = cfg.lens_pose(k, l);
	const Rigid lens_inv = lens.inverse();
	const std::size_t type = cfg.mla.type_of(k, l);
	const double f_i = cfg.types[type].focal;
	const double d = cfg.mla.dist_sensor;
	const double lens_r = cfg.mla.diameter() / 2.0;

	// virtual image of the point behind the main lens, in the micro-lens frame
	const P3D virt = thin_lens_image(cfg.main_lens.focal, point);
	const P3D virt_mu = lens_inv(virt);
	const P3D img_mu = thin_lens_image(f_i, virt_mu);

	const int n = std::max(16, static_cast<int>(std::lround(std::sqrt(static_cast<double>(rays)))));
	P2D sum = P2D::Zero();
	double sum2 = 0.0;
	double q2_all = 0.0; // second moment of the sample set itself, for quadrature removal
	int passed = 0, sampled = 0;
	for (int sy = 0; sy < n; ++sy)
	{
		for (int sx = 0; sx < n; ++sx)
		{
			const double ux = (sx + 0.5) / n * 2.0 - 1.0;
			const double uy = (sy + 0.5) / n * 2.0 - 1.0;
			if (ux * ux + uy * uy > 1.0) continue; // grid restricted to the aperture disk
			const P3D q{lens_r * ux, lens_r * uy, 0.0};
			++sampled;
			q2_all += q.head<2>().squaredNorm();

			// trace backward to the main lens plane and test the stop
			const P3D dir_in = (q - virt_mu).normalized();
			const P3D q_cam = lens(q);
			const P3D dir_cam = lens.rotation * dir_in;
			if (std::abs(dir_cam.z()) < 1e-15) continue;
			const double t = -q_cam.z() / dir_cam.z();
			const P3D on_lens = q_cam + t * dir_cam;
			if (on_lens.head<2>().norm() > ap_r) continue; // blocked at the stop

			// micro-lens re-imaging: the refracted ray joins q to the micro image
			const P3D out_dir = img_mu - q;
			if (std::abs(out_dir.z()) < 1e-15) continue;
			const double ts = (-d - q.z()) / out_dir.z();
			const P3D hit_mu = q + ts * out_dir;

			const P3D hit_cam = lens(hit_mu);
			const P2D px{cfg.main_lens.u0 + hit_cam.x() / cfg.sensor.pixel_size,
			             cfg.main_lens.v0 + hit_cam.y() / cfg.sensor.pixel_size};
			sum += px;
			sum2 += px.squaredNorm();
			++passed;
		}
	}
	// a spot losing most of its bundle would not survive detection
	if (passed < std::max(1, static_cast<int>(0.3 * sampled))) return std::nullopt;
	SpotObservation spot;
	spot.centroid = sum / static_cast<double>(passed);
	spot.weight = static_cast<double>(passed) / static_cast<double>(sampled);
	// a uniform disk of radius rho has total lateral variance rho^2 / 2; the sample
	// set's own moment removes the grid quadrature bias exactly
	const double var = std::max(0.0, sum2 / static_cast<double>(passed) - spot.centroid.squaredNorm());
	const double quad = q2_all / static_cast<double>(sampled) /
	                    (0.5 * lens_r * lens_r);
	spot.rms_radius = std::sqrt(2.0 * var / quad);
	return spot;
}

// Triangulate a cluster in virtual space: observations follow
// hit = C + (X_v - C) / v, linear in (w = 1/v, Y = w X_v); rows are weighted by
// the observation reliability.
double refit_cluster_virtual_depth(const CameraConfig& cfg, const std::vector<BapFeature>& cluster,
                                   const std::vector<double>& weights)
{
	Eigen::MatrixXd a(2 * cluster.size(), 3);
	Eigen::VectorXd b(2 * cluster.size());
	const double s = cfg.sensor.pixel_size;
	for (std::size_t i = 0; i < cluster.size(); ++i)
	{
		const auto& f = cluster[i];
		const double w = std::sqrt(weights[i]);
		const P3D c = cfg.lens_pose(f.k, f.l).translation; // micro-lens center
		const P2D hit{(f.u - cfg.main_lens.u0) * s, (f.v - cfg.main_lens.v0) * s};
		a.row(2 * i) << -w * c.x(), w, 0.0;
		a.row(2 * i + 1) << -w * c.y(), 0.0, w;
		b[2 * i] = w * (hit.x() - c.x());
		b[2 * i + 1] = w * (hit.y() - c.y());
	}
	const Eigen::Vector3d sol = (a.transpose() * a).ldlt().solve(a.transpose() * b);
	if (std::abs(sol[0]) < 1e-12)
		throw std::runtime_error("cluster refit: virtual depth at infinity");
	return 1.0 / sol[0];
}

std::vector<BapFeature> observe_point(const CameraConfig& cfg, const MiaLayout& mia,
                                      const P3D& point, const RenderSettings& settings,
                                      std::vector<double>* out_weights = nullptr)
{
	std::vector<BapFeature> cluster;
	std::vector<double> weights;
	for (std::size_t l = 0; l < cfg.mla.rows; ++l)
	{
		for (std::size_t k = 0; k < cfg.mla.cols; ++k)
		{
			ProjectionResult res;
			try { res = project(cfg, point, k, l); }
			catch (const std::domain_error&) { continue; }
			if (not res.on_sensor) continue;
			if ((P2D{res.feature.u, res.feature.v} - mia.center(k, l)).norm() > mia.radius)
				continue;

			double weight = 1.0;
			if (settings.aperture == ApertureMode::full)
			{
				const auto spot = aperture_spot_centroid(cfg, point, k, l, settings.rays);
				if (not spot) continue;
				res.feature.u = spot->centroid.x();
				res.feature.v = spot->centroid.y();
				// blur magnitude as a detector would measure it; the sign is not
				// observable in a single spot and follows the model prediction
				res.feature.rho = std::copysign(spot->rms_radius, res.feature.rho);
				weight = spot->weight;
			}
			cluster.push_back(res.feature);
			weights.push_back(weight);
		}
	}

	if (out_weights) *out_weights = std::move(weights);
	return cluster;
}

// Joint virtual depth of a fronto-planar frame: every cluster shares one w = 1/v
// while keeping its own lateral position, hit - C = -w C + Y_i. The lateral span of
// the whole board conditions w far better than any single corner can.
double refit_frame_virtual_depth(const CameraConfig& cfg,
                                 const std::vector<std::vector<BapFeature>>& clusters,
                                 const std::vector<std::vector<double>>& weights)
{
	const std::size_t nc = clusters.size();
	const std::size_t unknowns = 1 + 2 * nc;
	Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(unknowns, unknowns);
	Eigen::VectorXd atb = Eigen::VectorXd::Zero(unknowns);
	const double s = cfg.sensor.pixel_size;

	for (std::size_t c = 0; c < nc; ++c)
	{
		for (std::size_t i = 0; i < clusters[c].size(); ++i)
		{
			const auto& f = clusters[c][i];
			const double w = weights[c][i] > 0.0 ? 1.0 : 0.0; // every surviving spot counts alike
			const P3D cl = cfg.lens_pose(f.k, f.l).translation;
			const P2D hit{(f.u - cfg.main_lens.u0) * s, (f.v - cfg.main_lens.v0) * s};
			// row x: [-C_x, ..., 1 (Y_cx), 0, ...] = hit_x - C_x
			for (int axis = 0; axis < 2; ++axis)
			{
				Eigen::VectorXd row = Eigen::VectorXd::Zero(unknowns);
				row[0] = -cl[axis];
				row[1 + 2 * c + axis] = 1.0;
				const double rhs = hit[axis] - cl[axis];
				ata += w * row * row.transpose();
				atb += w * row * rhs;
			}
		}
	}
	const Eigen::VectorXd sol = ata.ldlt().solve(atb);
	if (std::abs(sol[0]) < 1e-12)
		throw std::runtime_error("frame refit: virtual depth at infinity");
	return 1.0 / sol[0];
}

} // namespace

ScaleObservation export_observations(const Scene& scene, const CameraConfig& cfg,
                                     const RenderSettings& settings, double frame_virtual_depth)
{
	settings.check();
	const SceneObject* board = scene.checkerboard();
	if (board == nullptr)
		throw std::invalid_argument("export_observations: scene has no checkerboard");

	const MiaLayout mia = cfg.mia();
	const auto corners = board->corner_points();

	ScaleObservation obs;
	obs.grid_cols = board->corners_x;
	obs.grid_rows = board->corners_y;
	obs.grid_spacing = board->square;
	obs.nominal_z = board->pose.translation.z();
	obs.clusters.reserve(corners.size());

	std::vector<std::vector<double>> weights(corners.size());
	for (std::size_t i = 0; i < corners.size(); ++i)
	{
		auto cluster = observe_point(cfg, mia, corners[i], settings, &weights[i]);
		if (cluster.empty())
			throw std::invalid_argument("export_observations: corner visible in no micro-lens");
		obs.clusters.push_back(std::move(cluster));
	}

	if (settings.aperture == ApertureMode::full)
	{
		// calibration frames are fronto-planar: every cluster shares the frame depth.
		// The caller usually supplies the depth estimator's own measurement; the
		// fallback triangulates the observed disparities directly.
		const double v = frame_virtual_depth > 0.0
		                     ? frame_virtual_depth
		                     : refit_frame_virtual_depth(cfg, obs.clusters, weights);
		for (auto& cluster : obs.clusters)
			for (auto& f : cluster) f.rho = virtual_depth_to_blur(cfg, v, f.type);
	}
	return obs;
}

PointConstellation export_constellation(const std::vector<P3D>& targets_cam,
                                        const CameraConfig& cfg, const RenderSettings& settings,
                                        const Rigid& ext_from_cam)
{
	settings.check();
	const MiaLayout mia = cfg.mia();
	PointConstellation con;
	for (std::size_t i = 0; i < targets_cam.size(); ++i)
	{
		std::vector<double> weights;
		auto cluster = observe_point(cfg, mia, targets_cam[i], settings, &weights);
		if (cluster.empty())
			throw std::invalid_argument("export_constellation: target visible in no micro-lens");
		if (settings.aperture == ApertureMode::full and cluster.size() >= 3)
		{
			const double v = refit_cluster_virtual_depth(cfg, cluster, weights);
			for (auto& f : cluster) f.rho = virtual_depth_to_blur(cfg, v, f.type);
		}
		con.clusters.push_back(std::move(cluster));
		con.points.push_back(ext_from_cam(targets_cam[i]));
	}
	return con;
}

std::vector<P3D> export_point_cloud(const GroundTruth& gt, std::size_t stride,
                                    const Rigid& ext_from_cam)
{
	if (stride == 0) throw std::invalid_argument("export_point_cloud: stride must be >= 1");
	std::vector<P3D> cloud;
	for (std::size_t y = 0; y < gt.height; y += stride)
		for (std::size_t x = 0; x < gt.width; x += stride)
		{
			const std::size_t idx = y * gt.width + x;
			if (not gt.valid[idx]) continue;
			cloud.push_back(ext_from_cam(gt.points[idx]));
		}
	return cloud;
}

} // namespace blade
