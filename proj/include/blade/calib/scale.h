#pragma once

#include "blade/calib/lm.h"
#include "blade/model/camera.h"

#include <cmath>
#include <functional>
#include <vector>

namespace blade {

/// Checkerboard observation of one frame: per corner, the BAP features that see it.
struct ScaleObservation
{
	std::size_t grid_cols = 0;  ///< I
	std::size_t grid_rows = 0;  ///< J
	double grid_spacing = 0.0;  ///< corner spacing [mm]
	double nominal_z = 0.0;     ///< diagnostic frame depth [mm], optional
	std::vector<std::vector<BapFeature>> clusters; ///< grid_cols * grid_rows entries, row-major

	std::size_t corner_count() const { return grid_cols * grid_rows; }

	/// Ground-truth distance between corners i and j of the grid.
	double corner_distance(std::size_t i, std::size_t j) const
	{
		const double xi = static_cast<double>(i % grid_cols), yi = static_cast<double>(i / grid_cols);
		const double xj = static_cast<double>(j % grid_cols), yj = static_cast<double>(j / grid_cols);
		return grid_spacing * std::sqrt((xi - xj) * (xi - xj) + (yi - yj) * (yi - yj));
	}
};

/// Mean of the unscaled back-projections of a cluster.
/// Throws std::invalid_argument on an empty cluster.
P3D compute_cluster_centroid(const CameraConfig& cfg, const std::vector<BapFeature>& cluster);

/// Mean over all distinct corner pairs of 1 - ||c_i - c_j|| / ||p_i - p_j||.
/// Positive means the reconstruction is smaller than the ground truth.
double scale_error(const std::vector<P3D>& centroids, const ScaleObservation& frame);

/// Same metric with explicit ground-truth pair distances (used by the report tooling).
double scale_error(const std::vector<P3D>& centroids,
                   const std::function<double(std::size_t, std::size_t)>& gt_distance);

struct ScaleFitReport
{
	int iterations = 0;
	bool converged = true;
	double initial_cost = 0.0;
	double final_cost = 0.0;
	std::vector<double> per_frame_error;         ///< post-fit epsilon_scale per frame
	double median_abs_error = 0.0;               ///< median |epsilon_scale| after the fit
};

/// A frame reduced to its corner centroids plus ground-truth pair distances.
struct CentroidFrame
{
	std::vector<P3D> centroids;
	std::vector<double> gt_distances; ///< for pairs (i, j), i < j, in lexicographic order
	double nominal_z = 0.0;
};

CentroidFrame make_centroid_frame(const CameraConfig& cfg, const ScaleObservation& obs);

/// Core fit: minimize the per-pair scale residuals over the polynomial coefficients,
/// each centroid rescaled by Gamma(z_i)/z_i with its own z.
ScaleModel fit_scale_model(const std::vector<CentroidFrame>& frames, ScaleKind kind,
                           ScaleFitReport& report, const LmSettings& settings = {});

/// Full pipeline entry: centroids from clusters, then fit.
ScaleModel calibrate_scale_model(const std::vector<ScaleObservation>& observations,
                                 const CameraConfig& cfg, ScaleKind kind,
                                 ScaleFitReport& report, const LmSettings& settings = {});

/// epsilon_scale of a frame after rescaling each centroid by the model.
double scale_error_with_model(const CentroidFrame& frame, const ScaleModel& model);

} // namespace blade
