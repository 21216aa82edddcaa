#pragma once

#include <functional>
#include <optional>

namespace blade {

struct GssResult
{
	double argmin = 0.0;
	double value = 0.0;   ///< +inf when every probe was invalid
	int evaluations = 0;
};

/// Golden-section minimization on [lo, hi], terminating at interval width <= tol and
/// returning the midpoint. Invalid probes (nullopt) count as +infinity; on plateaus
/// the lower-v bracket is kept. Unimodal f is bracketed exactly; otherwise a local
/// minimum is returned.
GssResult golden_section_minimize(const std::function<std::optional<double>(double)>& f,
                                  double lo, double hi, double tol);

/// Pre-scan with `samples` uniform probes (in the given coordinates), then golden
/// section inside the bracketing sub-interval around the best probe.
GssResult scan_then_minimize(const std::function<std::optional<double>(double)>& f,
                             double lo, double hi, int samples, double tol);

} // namespace blade
