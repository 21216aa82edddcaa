#include "blade/calib/scale.h"

#include "blade/model/projection.h"

#include <algorithm>
#include <stdexcept>

namespace blade {

namespace {

double median_of(std::vector<double> v)
{
	if (v.empty()) return 0.0;
	const std::size_t mid = v.size() / 2;
	std::nth_element(v.begin(), v.begin() + mid, v.end());
	double m = v[mid];
	if (v.size() % 2 == 0)
	{
		const auto lower = *std::max_element(v.begin(), v.begin() + mid);
		m = 0.5 * (m + lower);
	}
	return m;
}

P3D rescaled(const P3D& p, const ScaleModel& model)
{
	if (model.kind == ScaleKind::identity) return p;
	return p * (model.gamma_of(p.z()) / p.z());
}

} // namespace

P3D compute_cluster_centroid(const CameraConfig& cfg, const std::vector<BapFeature>& cluster)
{
	if (cluster.empty())
		throw std::invalid_argument("compute_cluster_centroid: empty cluster");
	P3D sum = P3D::Zero();
	for (const auto& f : cluster) sum += back_project(cfg, f);
	return sum / static_cast<double>(cluster.size());
}

double scale_error(const std::vector<P3D>& centroids,
                   const std::function<double(std::size_t, std::size_t)>& gt_distance)
{
	const std::size_t n = centroids.size();
	if (n < 2) throw std::invalid_argument("scale_error: need at least two corners");
	double sum = 0.0;
	std::size_t pairs = 0;
	for (std::size_t i = 0; i < n; ++i)
	{
		for (std::size_t j = i + 1; j < n; ++j)
		{
			const double gt = gt_distance(i, j);
			if (not (gt > 0.0)) throw std::invalid_argument("scale_error: coincident ground-truth points");
			sum += 1.0 - (centroids[i] - centroids[j]).norm() / gt;
			++pairs;
		}
	}
	return sum / static_cast<double>(pairs);
}

double scale_error(const std::vector<P3D>& centroids, const ScaleObservation& frame)
{
	if (centroids.size() != frame.corner_count())
		throw std::invalid_argument("scale_error: all grid corners must have a centroid");
	return scale_error(centroids, [&](std::size_t i, std::size_t j) {
		return frame.corner_distance(i, j);
	});
}

CentroidFrame make_centroid_frame(const CameraConfig& cfg, const ScaleObservation& obs)
{
	if (obs.grid_cols < 2 or obs.grid_rows < 2)
		throw std::invalid_argument("scale calibration: grid must be at least 2x2");
	if (obs.clusters.size() != obs.corner_count())
		throw std::invalid_argument("scale calibration: cluster count does not match the grid");

	CentroidFrame frame;
	frame.nominal_z = obs.nominal_z;
	frame.centroids.reserve(obs.corner_count());
	for (const auto& cluster : obs.clusters)
		frame.centroids.push_back(compute_cluster_centroid(cfg, cluster));
	const std::size_t n = obs.corner_count();
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = i + 1; j < n; ++j)
			frame.gt_distances.push_back(obs.corner_distance(i, j));
	return frame;
}

double scale_error_with_model(const CentroidFrame& frame, const ScaleModel& model)
{
	std::vector<P3D> scaled;
	scaled.reserve(frame.centroids.size());
	for (const auto& c : frame.centroids) scaled.push_back(rescaled(c, model));
	std::size_t idx = 0;
	double sum = 0.0;
	for (std::size_t i = 0; i < scaled.size(); ++i)
		for (std::size_t j = i + 1; j < scaled.size(); ++j, ++idx)
			sum += 1.0 - (scaled[i] - scaled[j]).norm() / frame.gt_distances[idx];
	return sum / static_cast<double>(frame.gt_distances.size());
}

ScaleModel fit_scale_model(const std::vector<CentroidFrame>& frames, ScaleKind kind,
                           ScaleFitReport& report, const LmSettings& settings)
{
	if (kind == ScaleKind::identity)
		throw std::invalid_argument("fit_scale_model: nothing to fit for the identity kind");
	const std::size_t min_frames = kind == ScaleKind::quadratic ? 3 : 2;
	if (frames.size() < min_frames)
		throw std::invalid_argument("fit_scale_model: not enough frames for the requested kind");

	// depth range sanity: frames at a single depth cannot constrain the polynomial
	double zmin = 1e300, zmax = -1e300;
	for (const auto& f : frames)
		for (const auto& c : f.centroids)
		{
			zmin = std::min(zmin, c.z());
			zmax = std::max(zmax, c.z());
		}
	if (zmax - zmin < 1e-6)
		throw std::invalid_argument("fit_scale_model: frames span no depth range (rank-deficient)");

	int residual_count = 0;
	for (const auto& f : frames) residual_count += static_cast<int>(f.gt_distances.size());

	const int nparams = kind == ScaleKind::quadratic ? 3 : 2;
	auto model_of = [&](const Eigen::VectorXd& x) {
		ScaleModel m;
		m.kind = kind;
		m.gamma0 = x[0];
		m.gamma1 = x[1];
		m.gamma2 = nparams > 2 ? x[2] : 0.0;
		return m;
	};

	// residuals are the per-pair scale errors; each frame is weighted so that the
	// squared cost is the mean over frames of the mean over pairs
	auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
		const ScaleModel model = model_of(x);
		int at = 0;
		for (const auto& frame : frames)
		{
			const double w = 1.0 / std::sqrt(static_cast<double>(frame.gt_distances.size()) *
			                                 static_cast<double>(frames.size()));
			std::vector<P3D> scaled;
			scaled.reserve(frame.centroids.size());
			for (const auto& c : frame.centroids) scaled.push_back(rescaled(c, model));
			std::size_t idx = 0;
			for (std::size_t i = 0; i < scaled.size(); ++i)
				for (std::size_t j = i + 1; j < scaled.size(); ++j, ++idx)
					r[at++] = w * (1.0 - (scaled[i] - scaled[j]).norm() / frame.gt_distances[idx]);
		}
	};

	Eigen::VectorXd x(nparams);
	x[0] = 0.0;
	x[1] = 1.0;
	if (nparams > 2) x[2] = 0.0;

	const LmReport lm = levenberg_marquardt(x, residuals, residual_count, settings);

	const ScaleModel model = model_of(x);
	report.iterations = lm.iterations;
	report.converged = lm.converged;
	report.initial_cost = lm.initial_cost;
	report.final_cost = lm.final_cost;
	report.per_frame_error.clear();
	std::vector<double> abs_errors;
	for (const auto& frame : frames)
	{
		const double e = scale_error_with_model(frame, model);
		report.per_frame_error.push_back(e);
		abs_errors.push_back(std::abs(e));
	}
	report.median_abs_error = median_of(abs_errors);
	return model;
}

ScaleModel calibrate_scale_model(const std::vector<ScaleObservation>& observations,
                                 const CameraConfig& cfg, ScaleKind kind,
                                 ScaleFitReport& report, const LmSettings& settings)
{
	std::vector<CentroidFrame> frames;
	frames.reserve(observations.size());
	for (const auto& obs : observations) frames.push_back(make_centroid_frame(cfg, obs));
	return fit_scale_model(frames, kind, report, settings);
}

} // namespace blade
