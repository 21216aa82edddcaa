#include "blade/calib/invdist.h"

#include "blade/model/projection.h"

#include <stdexcept>

namespace blade {

InverseDistortionParams calibrate_inverse_distortion(
	const DistortionParams& direct, const SamplingVolume& volume,
	InverseDistortionReport& report, const LmSettings& settings)
{
	if (volume.degenerate())
		throw std::invalid_argument("calibrate_inverse_distortion: degenerate sampling volume");
	for (double c : {direct.q1, direct.q2, direct.q3, direct.p1, direct.p2})
		if (not std::isfinite(c))
			throw std::invalid_argument("calibrate_inverse_distortion: non-finite direct coefficients");

	// uniform grid of samples, distorted once up front
	const std::size_t na = volume.samples_per_axis;
	std::vector<P3D> samples, distorted;
	samples.reserve(na * na * na);
	auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
	for (std::size_t iz = 0; iz < na; ++iz)
		for (std::size_t iy = 0; iy < na; ++iy)
			for (std::size_t ix = 0; ix < na; ++ix)
			{
				const double tx = na > 1 ? static_cast<double>(ix) / (na - 1) : 0.5;
				const double ty = na > 1 ? static_cast<double>(iy) / (na - 1) : 0.5;
				const double tz = na > 1 ? static_cast<double>(iz) / (na - 1) : 0.5;
				const P3D p{lerp(volume.lo.x(), volume.hi.x(), tx),
				            lerp(volume.lo.y(), volume.hi.y(), ty),
				            lerp(volume.lo.z(), volume.hi.z(), tz)};
				samples.push_back(p);
				distorted.push_back(distort(direct, p));
			}

	const int m = static_cast<int>(samples.size()) * 2; // z is unaffected by the lateral model

	auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
		const InverseDistortionParams inv{x[0], x[1], x[2], x[3], x[4]};
		for (std::size_t i = 0; i < samples.size(); ++i)
		{
			const P3D back = undistort(inv, distorted[i]);
			r[2 * i] = back.x() - samples[i].x();
			r[2 * i + 1] = back.y() - samples[i].y();
		}
	};

	Eigen::VectorXd x(5);
	x << direct.q1, direct.q2, direct.q3, direct.p1, direct.p2;

	const LmReport lm = levenberg_marquardt(x, residuals, m, settings);

	report.iterations = lm.iterations;
	report.converged = lm.converged;
	report.cost_trace = lm.cost_trace;
	report.rmse = std::sqrt(2.0 * lm.final_cost / static_cast<double>(samples.size()));

	return {x[0], x[1], x[2], x[3], x[4]};
}

} // namespace blade
