#include "blade/calib/lm.h"

#include <Eigen/Dense>

#include <cmath>

namespace blade {

LmReport levenberg_marquardt(
	Eigen::VectorXd& x,
	const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& residuals,
	int residual_count,
	const LmSettings& settings)
{
	const int n = static_cast<int>(x.size());
	Eigen::VectorXd r(residual_count), r_try(residual_count), r_probe(residual_count);
	Eigen::MatrixXd jac(residual_count, n);

	residuals(x, r);
	double cost = 0.5 * r.squaredNorm();

	LmReport report;
	report.initial_cost = cost;
	report.cost_trace.push_back(cost);

	double damping = settings.initial_damping;

	auto compute_jacobian = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& r0) {
		for (int j = 0; j < n; ++j)
		{
			const double h = 1e-6 * std::max(std::abs(at[j]), 1.0e-6);
			Eigen::VectorXd xp = at;
			xp[j] += h;
			residuals(xp, r_probe);
			jac.col(j) = (r_probe - r0) / h;
		}
	};

	for (int iter = 0; iter < settings.max_iterations; ++iter)
	{
		compute_jacobian(x, r);
		const Eigen::MatrixXd jtj = jac.transpose() * jac;
		const Eigen::VectorXd jtr = jac.transpose() * r;

		if (jtr.lpNorm<Eigen::Infinity>() < 1e-16)
		{
			report.converged = true;
			break;
		}

		bool accepted = false;
		for (int attempt = 0; attempt < 16; ++attempt)
		{
			Eigen::MatrixXd a = jtj;
			a.diagonal() += damping * jtj.diagonal().cwiseMax(1e-12);
			const Eigen::VectorXd step = a.ldlt().solve(-jtr);

			residuals(x + step, r_try);
			const double cost_try = 0.5 * r_try.squaredNorm();
			if (cost_try < cost)
			{
				x += step;
				r = r_try;
				const double decrease = (cost - cost_try) / std::max(cost, 1e-300);
				cost = cost_try;
				damping = std::max(damping * 0.3, 1e-12);
				++report.iterations;
				report.cost_trace.push_back(cost);
				accepted = true;

				if (decrease < settings.cost_tolerance or step.norm() < settings.step_tolerance)
					report.converged = true;
				break;
			}
			damping *= 4.0;
		}

		if (not accepted or report.converged)
		{
			report.converged = report.converged or not accepted;
			break;
		}
	}

	report.final_cost = cost;
	return report;
}

} // namespace blade
