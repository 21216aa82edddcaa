#include "blade/depth/gss.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace blade {

namespace {
constexpr double kInvPhi = 0.6180339887498948482045868; // 1 / golden ratio
constexpr double kInf = std::numeric_limits<double>::infinity();

double value_or_inf(const std::optional<double>& v) { return v ? *v : kInf; }
} // namespace

GssResult golden_section_minimize(const std::function<std::optional<double>(double)>& f,
                                  double lo, double hi, double tol)
{
	if (not (lo < hi)) throw std::invalid_argument("golden_section_minimize: lo must be below hi");
	if (not (tol > 0.0)) throw std::invalid_argument("golden_section_minimize: tol must be positive");

	GssResult res;
	double x1 = hi - (hi - lo) * kInvPhi;
	double x2 = lo + (hi - lo) * kInvPhi;
	double f1 = value_or_inf(f(x1));
	double f2 = value_or_inf(f(x2));
	res.evaluations = 2;

	while (hi - lo > tol)
	{
		// ties keep the lower-v bracket, unless the left probe is invalid
		const bool keep_left = std::isinf(f1) ? (f1 < f2) : (f1 <= f2);
		if (keep_left)
		{
			hi = x2;
			x2 = x1;
			f2 = f1;
			x1 = hi - (hi - lo) * kInvPhi;
			f1 = value_or_inf(f(x1));
		}
		else
		{
			lo = x1;
			x1 = x2;
			f1 = f2;
			x2 = lo + (hi - lo) * kInvPhi;
			f2 = value_or_inf(f(x2));
		}
		++res.evaluations;
	}

	res.argmin = 0.5 * (lo + hi);
	res.value = std::min(f1, f2);
	return res;
}

GssResult scan_then_minimize(const std::function<std::optional<double>(double)>& f,
                             double lo, double hi, int samples, double tol)
{
	if (samples < 2) throw std::invalid_argument("scan_then_minimize: need at least 2 samples");

	std::vector<double> xs(samples), fs(samples);
	int best = -1;
	for (int i = 0; i < samples; ++i)
	{
		xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
		fs[i] = value_or_inf(f(xs[i]));
		if (best < 0 or fs[i] < fs[best]) best = i;
	}

	GssResult res;
	res.evaluations = samples;
	if (std::isinf(fs[best]))
	{
		res.argmin = 0.5 * (lo + hi);
		res.value = kInf;
		return res;
	}

	const double blo = xs[std::max(0, best - 1)];
	const double bhi = xs[std::min(samples - 1, best + 1)];
	if (bhi - blo <= tol)
	{
		res.argmin = xs[best];
		res.value = fs[best];
		return res;
	}

	GssResult inner = golden_section_minimize(f, blo, bhi, tol);
	inner.evaluations += res.evaluations;
	// the scan probe can beat the midpoint when the basin is narrow
	if (fs[best] < inner.value)
	{
		inner.argmin = xs[best];
		inner.value = fs[best];
	}
	return inner;
}

} // namespace blade
