#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace blade {

struct LmSettings
{
	int max_iterations = 100;
	double initial_damping = 1e-3;
	double cost_tolerance = 1e-12;  ///< relative cost decrease below which we stop
	double step_tolerance = 1e-12;  ///< parameter step norm below which we stop
};

struct LmReport
{
	int iterations = 0;          ///< accepted steps
	double initial_cost = 0.0;   ///< 0.5 * ||r||^2
	double final_cost = 0.0;
	bool converged = false;
	std::vector<double> cost_trace; ///< cost after each accepted step
};

/// Damped least squares with forward-difference Jacobians (relative step 1e-6).
/// `residuals(x, r)` fills r; the residual count must not change between calls.
LmReport levenberg_marquardt(
	Eigen::VectorXd& x,
	const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& residuals,
	int residual_count,
	const LmSettings& settings = {});

} // namespace blade
