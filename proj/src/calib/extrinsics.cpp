#include "blade/calib/extrinsics.h"

#include "blade/model/projection.h"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace blade {

namespace {

// EPnP-style absolute pose: express the points in a barycentric control-point
// basis, recover the control points in camera frame from the null space of the
// projection constraints, then align with a rigid Procrustes fit.
Rigid epnp(const std::vector<P2D>& obs, const std::vector<P3D>& pts)
{
	const std::size_t n = pts.size();

	// control points: centroid + principal axes
	P3D c0 = P3D::Zero();
	for (const auto& p : pts) c0 += p;
	c0 /= static_cast<double>(n);

	Eigen::MatrixXd centered(n, 3);
	for (std::size_t i = 0; i < n; ++i) centered.row(i) = (pts[i] - c0).transpose();
	Eigen::SelfAdjointEigenSolver<Mat3> eig(centered.transpose() * centered / static_cast<double>(n));

	Mat3 axes = eig.eigenvectors(); // ascending eigenvalues
	P3D scale = eig.eigenvalues().cwiseMax(1e-12).cwiseSqrt();

	P3D cw[4];
	cw[0] = c0;
	for (int j = 0; j < 3; ++j) cw[j + 1] = c0 + axes.col(j) * scale[j];

	// barycentric coordinates of every point
	Eigen::Matrix4d cmat;
	for (int j = 0; j < 4; ++j)
	{
		cmat.block<3, 1>(0, j) = cw[j];
		cmat(3, j) = 1.0;
	}
	const Eigen::Matrix4d cinv = cmat.inverse();

	Eigen::MatrixXd alphas(n, 4);
	for (std::size_t i = 0; i < n; ++i)
	{
		Eigen::Vector4d hp;
		hp << pts[i], 1.0;
		alphas.row(i) = (cinv * hp).transpose();
	}

	// null-space system from u = x/z, v = y/z
	Eigen::MatrixXd msys(2 * n, 12);
	msys.setZero();
	for (std::size_t i = 0; i < n; ++i)
	{
		for (int j = 0; j < 4; ++j)
		{
			const double a = alphas(i, j);
			msys(2 * i, 3 * j) = a;
			msys(2 * i, 3 * j + 2) = -a * obs[i].x();
			msys(2 * i + 1, 3 * j + 1) = a;
			msys(2 * i + 1, 3 * j + 2) = -a * obs[i].y();
		}
	}

	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esys(msys.transpose() * msys);

	// inter-control-point distances in the world frame
	double dist_w[6];
	{
		int pair = 0;
		for (int j = 0; j < 4; ++j)
			for (int k = j + 1; k < 4; ++k) dist_w[pair++] = (cw[j] - cw[k]).norm();
	}

	Rigid best;
	double best_err = std::numeric_limits<double>::max();

	// pose from a candidate set of camera-frame control points
	auto try_candidate = [&](const P3D cc[4]) {
		Eigen::Matrix<double, 3, Eigen::Dynamic> cam_pts(3, n);
		double zsum = 0.0;
		for (std::size_t i = 0; i < n; ++i)
		{
			P3D p = P3D::Zero();
			for (int j = 0; j < 4; ++j) p += alphas(i, j) * cc[j];
			cam_pts.col(i) = p;
			zsum += p.z();
		}
		if (zsum < 0.0) cam_pts = -cam_pts;

		Eigen::Matrix<double, 3, Eigen::Dynamic> world_pts(3, n);
		for (std::size_t i = 0; i < n; ++i) world_pts.col(i) = pts[i];

		const Eigen::Matrix4d t = Eigen::umeyama(world_pts, cam_pts, false);
		Rigid pose;
		pose.rotation = t.topLeftCorner<3, 3>();
		pose.translation = t.topRightCorner<3, 1>();

		double err = 0.0;
		for (std::size_t i = 0; i < n; ++i)
		{
			const P3D p = pose(pts[i]);
			if (p.z() <= 0.0)
			{
				err = std::numeric_limits<double>::max();
				break;
			}
			err += (P2D{p.x() / p.z(), p.y() / p.z()} - obs[i]).squaredNorm();
		}
		if (err < best_err)
		{
			best_err = err;
			best = pose;
		}
	};

	// case N = 1: a single null-space vector scaled to preserve distances
	for (int cand = 0; cand < 4; ++cand)
	{
		const Eigen::VectorXd vec = esys.eigenvectors().col(cand);
		P3D cc[4];
		for (int j = 0; j < 4; ++j) cc[j] = vec.segment<3>(3 * j);

		double num = 0.0, den = 0.0;
		int pair = 0;
		for (int j = 0; j < 4; ++j)
			for (int k = j + 1; k < 4; ++k)
			{
				const double dv = (cc[j] - cc[k]).norm();
				num += dv * dist_w[pair++];
				den += dv * dv;
			}
		if (den < 1e-18) continue;
		const double beta = num / den;
		for (int j = 0; j < 4; ++j) cc[j] *= beta;
		try_candidate(cc);
	}

	// case N = 2: combination of the two smallest vectors; the six distance
	// constraints are linear in (b1^2, b1 b2, b2^2)
	{
		const Eigen::VectorXd va = esys.eigenvectors().col(0);
		const Eigen::VectorXd vb = esys.eigenvectors().col(1);
		Eigen::Matrix<double, 6, 3> lsys;
		Eigen::Matrix<double, 6, 1> rho;
		int pair = 0;
		for (int j = 0; j < 4; ++j)
			for (int k = j + 1; k < 4; ++k)
			{
				const P3D da = va.segment<3>(3 * j) - va.segment<3>(3 * k);
				const P3D db = vb.segment<3>(3 * j) - vb.segment<3>(3 * k);
				lsys.row(pair) << da.squaredNorm(), 2.0 * da.dot(db), db.squaredNorm();
				rho[pair] = dist_w[pair] * dist_w[pair];
				++pair;
			}
		const Eigen::Vector3d b = (lsys.transpose() * lsys).ldlt().solve(lsys.transpose() * rho);
		if (b[0] > 0.0 or b[2] > 0.0)
		{
			const double b1 = std::sqrt(std::abs(b[0]));
			const double b2 = (b1 > 1e-18 ? b[1] / b1 : std::sqrt(std::abs(b[2])));
			P3D cc[4];
			for (int j = 0; j < 4; ++j)
				cc[j] = b1 * va.segment<3>(3 * j) + b2 * vb.segment<3>(3 * j);
			try_candidate(cc);
		}
	}

	if (best_err == std::numeric_limits<double>::max())
		throw std::runtime_error("solve_pnp: degenerate configuration");
	return best;
}

} // namespace

Rigid solve_pnp(const std::vector<P2D>& normalized, const std::vector<P3D>& points)
{
	if (normalized.size() != points.size() or points.size() < 4)
		throw std::invalid_argument("solve_pnp: need at least 4 point correspondences");
	return epnp(normalized, points);
}

RegistrationResult register_constellation(const CameraConfig& cfg,
                                          const PointConstellation& constellation,
                                          const LmSettings& settings)
{
	const std::size_t n = constellation.points.size();
	if (n < 4 or constellation.clusters.size() != n)
		throw std::invalid_argument("register_constellation: need >= 4 points with clusters");

	// steps 1-2: cluster barycenters as pinhole projections through the main lens,
	// sensor at D + d behind it, converted to normalized image coordinates
	const double f_px = (cfg.mla.dist_main + cfg.mla.dist_sensor) / cfg.sensor.pixel_size;
	std::vector<P2D> normalized;
	normalized.reserve(n);
	for (const auto& cluster : constellation.clusters)
	{
		if (cluster.empty())
			throw std::invalid_argument("register_constellation: empty observation cluster");
		P2D bary = P2D::Zero();
		for (const auto& f : cluster) bary += P2D{f.u, f.v};
		bary /= static_cast<double>(cluster.size());
		// image inversion: u - u0 = -f_px * x / z
		normalized.emplace_back((cfg.main_lens.u0 - bary.x()) / f_px,
		                        (cfg.main_lens.v0 - bary.y()) / f_px);
	}

	// step 3: PnP initialization
	const Rigid init = solve_pnp(normalized, constellation.points);

	// step 4: LM refinement of the full blur-aware reprojection error
	int m = 0;
	for (const auto& cluster : constellation.clusters) m += 3 * static_cast<int>(cluster.size());

	auto reproject = [&](const Rigid& pose, const BapFeature& f, const P3D& p, double* out) -> bool {
		try
		{
			CameraConfig view = cfg; // world pose substituted by the candidate registration
			view.world_pose = pose;
			const auto res = project(view, p, f.k, f.l);
			out[0] = res.feature.u - f.u;
			out[1] = res.feature.v - f.v;
			out[2] = res.feature.rho - f.rho;
			return true;
		}
		catch (const std::domain_error&)
		{
			return false;
		}
	};

	auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
		const Rigid pose = Rigid::from_axis_angle(x.head<3>(), x.tail<3>());
		int at = 0;
		double e[3];
		for (std::size_t i = 0; i < n; ++i)
		{
			for (const auto& f : constellation.clusters[i])
			{
				if (reproject(pose, f, constellation.points[i], e))
				{
					r[at++] = e[0];
					r[at++] = e[1];
					r[at++] = e[2];
				}
				else
				{
					r[at++] = 1e6; // point pushed behind the lens; step will be rejected
					r[at++] = 1e6;
					r[at++] = 1e6;
				}
			}
		}
	};

	auto uv_rmse = [&](const Rigid& pose) {
		double sum = 0.0;
		std::size_t count = 0;
		double e[3];
		for (std::size_t i = 0; i < n; ++i)
			for (const auto& f : constellation.clusters[i])
			{
				if (not reproject(pose, f, constellation.points[i], e)) return 1e9;
				sum += e[0] * e[0] + e[1] * e[1];
				++count;
			}
		return std::sqrt(sum / static_cast<double>(count));
	};

	Eigen::VectorXd x(6);
	x.head<3>() = init.axis_angle();
	x.tail<3>() = init.translation;

	const LmReport lm = levenberg_marquardt(x, residuals, m, settings);

	RegistrationResult result;
	result.cam_from_ext = Rigid::from_axis_angle(x.head<3>(), x.tail<3>());
	result.pnp_rmse = uv_rmse(init);
	result.refined_rmse = uv_rmse(result.cam_from_ext);
	result.iterations = lm.iterations;
	result.converged = lm.converged;
	return result;
}

} // namespace blade
