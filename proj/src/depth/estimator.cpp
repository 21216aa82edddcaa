#include "blade/depth/estimator.h"

#include "blade/core/parallel.h"
#include "blade/depth/gss.h"

#include <algorithm>
#include <cmath>

namespace blade {

std::size_t VirtualDepthMap::valid_count() const
{
	std::size_t n = 0;
	for (const auto s : states)
		if (s == DepthState::valid) ++n;
	return n;
}

VirtualDepthMap VirtualDepthMap::create(EstimationMode mode, std::size_t w, std::size_t h)
{
	VirtualDepthMap map;
	map.mode = mode;
	map.width = w;
	map.height = h;
	map.values.assign(w * h, kNoDepth);
	map.states.assign(w * h, DepthState::invalid);
	map.costs.assign(w * h, 0.0);
	return map;
}

void search_range(const CameraConfig& cfg, const MiaLayout& mia, const EstimatorSettings& settings,
                  double& v_min, double& v_max)
{
	v_min = settings.v_min > 0.0 ? settings.v_min : 1.0 + settings.v_margin;
	if (settings.v_max > 0.0)
	{
		v_max = settings.v_max;
		return;
	}
	// the same-type baseline stops being resolvable once its disparity excursion
	// from infinity, lambda |B'| / v, drops under min_disparity
	const double same_type_baseline = 2.0 * std::sin(M_PI / 3.0) * mia.pitch_px;
	v_max = cfg.lambda * same_type_baseline / settings.min_disparity;
	if (v_max <= v_min) v_max = v_min * 4.0;
}

namespace {

struct SearchContext
{
	const Matcher* matcher;
	double v_min, v_max;
	int init_samples;
};

SearchContext make_context(const Matcher& matcher)
{
	const auto& s = matcher.settings();
	SearchContext ctx;
	ctx.matcher = &matcher;
	search_range(matcher.config(), matcher.mia(), s, ctx.v_min, ctx.v_max);

	// initialization probes uniform in 1/v so the disparity advances by roughly
	// scan_step_px per probe along the same-type baseline
	const double baseline = 2.0 * std::sin(M_PI / 3.0) * matcher.mia().pitch_px;
	const double disparity_span =
		matcher.config().lambda * baseline * (1.0 / ctx.v_min - 1.0 / ctx.v_max);
	ctx.init_samples = std::max(8, static_cast<int>(std::ceil(disparity_span / s.scan_step_px)));
	return ctx;
}

/// Same-type scan over the full range (uniform in 1/v), then golden section in v
/// inside the bracketing interval.
std::optional<GssResult> initialize_depth(const SearchContext& ctx,
                                          const std::function<Similarity(double)>& cost_fn)
{
	const double w_lo = 1.0 / ctx.v_max;
	const double w_hi = 1.0 / ctx.v_min;
	const int n = ctx.init_samples;

	std::vector<double> ws(n), fs(n);
	int best = -1;
	for (int i = 0; i < n; ++i)
	{
		ws[i] = w_lo + (w_hi - w_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
		const auto c = cost_fn(1.0 / ws[i]);
		fs[i] = c ? *c : std::numeric_limits<double>::infinity();
		if (best < 0 or fs[i] < fs[best]) best = i;
	}
	if (std::isinf(fs[best])) return std::nullopt;

	const double v_hi = 1.0 / ws[std::max(0, best - 1)];
	const double v_lo = 1.0 / ws[std::min(n - 1, best + 1)];
	GssResult res = golden_section_minimize(
		[&](double v) { return cost_fn(v); }, v_lo, v_hi, ctx.matcher->settings().gss_tolerance);
	if (fs[best] < res.value)
	{
		res.argmin = 1.0 / ws[best];
		res.value = fs[best];
	}
	return res;
}

/// Mixed-type refinement within [v0 - N, v0 + N].
GssResult refine_depth(const SearchContext& ctx, double v0,
                       const std::function<Similarity(double)>& cost_fn)
{
	const auto& s = ctx.matcher->settings();
	const double lo = std::max(ctx.v_min, v0 - s.search_half_width);
	const double hi = std::min(ctx.v_max, v0 + s.search_half_width);
	if (not (hi > lo)) return {v0, std::numeric_limits<double>::infinity(), 0};
	return scan_then_minimize([&](double v) { return cost_fn(v); }, lo, hi, 5, s.gss_tolerance);
}

} // namespace

VirtualDepthMap estimate_coarse(const ImageF& raw, const CameraConfig& cfg, const MiaLayout& mia,
                                const EstimatorSettings& settings)
{
	const Matcher matcher(raw, cfg, mia, settings);
	const SearchContext ctx = make_context(matcher);

	VirtualDepthMap map = VirtualDepthMap::create(EstimationMode::coarse, mia.cols, mia.rows);

	parallel_for(0, mia.cols * mia.rows, [&](std::size_t idx) {
		const std::size_t k = idx % mia.cols;
		const std::size_t l = idx / mia.cols;
		const MicroImageView ref = matcher.view(k, l);

		if (matcher.texture_std(ref) <= settings.texture_threshold)
		{
			map.states[idx] = DepthState::untextured;
			return;
		}

		const auto init = initialize_depth(ctx, [&](double v) {
			return matcher.cost(ref, v, /*same_type_only=*/true);
		});
		if (not init) return; // stays invalid

		const GssResult fin = refine_depth(ctx, init->argmin, [&](double v) {
			return matcher.cost(ref, v, /*same_type_only=*/false);
		});
		if (std::isinf(fin.value)) return;

		map.values[idx] = fin.argmin;
		map.costs[idx] = fin.value;
		map.states[idx] = DepthState::valid;
	});
	return map;
}

VirtualDepthMap estimate_refined(const ImageF& raw, const CameraConfig& cfg, const MiaLayout& mia,
                                 const EstimatorSettings& settings)
{
	const Matcher matcher(raw, cfg, mia, settings);
	const SearchContext ctx = make_context(matcher);

	VirtualDepthMap map =
		VirtualDepthMap::create(EstimationMode::refined, raw.width(), raw.height());

	const double r = matcher.usable_radius();

	parallel_for(0, mia.cols * mia.rows, [&](std::size_t lens_idx) {
		const std::size_t k = lens_idx % mia.cols;
		const std::size_t l = lens_idx / mia.cols;
		const MicroImageView ref = matcher.view(k, l);

		const long x_lo = std::max(0l, static_cast<long>(std::floor(ref.center.x() - r)));
		const long x_hi = std::min(static_cast<long>(raw.width()) - 1,
		                           static_cast<long>(std::ceil(ref.center.x() + r)));
		const long y_lo = std::max(0l, static_cast<long>(std::floor(ref.center.y() - r)));
		const long y_hi = std::min(static_cast<long>(raw.height()) - 1,
		                           static_cast<long>(std::ceil(ref.center.y() + r)));

		// pass 1: per-pixel initialization from same-type views over the full range
		std::vector<std::pair<std::size_t, double>> seeds; // map index -> v0
		for (long y = y_lo; y <= y_hi; ++y)
		{
			for (long x = x_lo; x <= x_hi; ++x)
			{
				const P2D p{static_cast<double>(x), static_cast<double>(y)};
				if ((p - ref.center).squaredNorm() > r * r) continue;
				const std::size_t idx = static_cast<std::size_t>(y) * map.width +
				                        static_cast<std::size_t>(x);
				if (matcher.texture_std_at(ref, p) <= settings.texture_threshold)
				{
					map.states[idx] = DepthState::untextured;
					continue;
				}
				const auto init = initialize_depth(ctx, [&](double v) {
					return matcher.cost_at(ref, v, /*same_type_only=*/true, p);
				});
				if (init) seeds.emplace_back(idx, init->argmin);
			}
		}

		// pass 2: mixed-type minimization around each seed
		for (const auto& [idx, v0] : seeds)
		{
			const P2D p{static_cast<double>(idx % map.width), static_cast<double>(idx / map.width)};
			const GssResult fin = refine_depth(ctx, v0, [&](double v) {
				return matcher.cost_at(ref, v, /*same_type_only=*/false, p);
			});
			if (std::isinf(fin.value)) continue;
			map.values[idx] = fin.argmin;
			map.costs[idx] = fin.value;
			map.states[idx] = DepthState::valid;
		}
	});
	return map;
}

VirtualDepthMap estimate(const ImageF& raw, const CameraConfig& cfg, const MiaLayout& mia,
                         const EstimatorSettings& settings)
{
	return settings.mode == EstimationMode::coarse ? estimate_coarse(raw, cfg, mia, settings)
	                                               : estimate_refined(raw, cfg, mia, settings);
}

MetricDepthMap to_metric(const VirtualDepthMap& vmap, const CameraConfig& cfg, const MiaLayout& mia)
{
	MetricDepthMap out;
	out.mode = vmap.mode;
	out.width = vmap.width;
	out.height = vmap.height;
	out.z_values.assign(vmap.values.size(), kNoDepth);
	out.states.assign(vmap.states.size(), DepthState::invalid);

	for (std::size_t idx = 0; idx < vmap.values.size(); ++idx)
	{
		out.states[idx] = vmap.states[idx];
		if (vmap.states[idx] != DepthState::valid) continue;
		const double v = vmap.values[idx];
		if (not (v > 0.0))
		{
			out.states[idx] = DepthState::invalid;
			continue;
		}

		MetricDepthEntry entry;
		BapFeature feat;
		if (vmap.mode == EstimationMode::coarse)
		{
			entry.k = idx % vmap.width;
			entry.l = idx / vmap.width;
			const P2D c = mia.center(entry.k, entry.l); // anchor pixel of the micro-image
			feat.u = c.x();
			feat.v = c.y();
			entry.px = static_cast<std::size_t>(std::lround(c.x()));
			entry.py = static_cast<std::size_t>(std::lround(c.y()));
		}
		else
		{
			entry.px = idx % vmap.width;
			entry.py = idx / vmap.width;
			feat.u = static_cast<double>(entry.px);
			feat.v = static_cast<double>(entry.py);
			std::size_t k = 0, l = 0;
			if (not mia.lens_of_pixel(P2D{feat.u, feat.v}, k, l))
			{
				out.states[idx] = DepthState::invalid;
				continue;
			}
			entry.k = k;
			entry.l = l;
		}

		feat.k = entry.k;
		feat.l = entry.l;
		feat.type = cfg.mla.type_of(entry.k, entry.l);
		feat.rho = virtual_depth_to_blur(cfg, v, feat.type);

		try
		{
			entry.point = apply_scale(cfg, back_project(cfg, feat));
		}
		catch (const std::domain_error&)
		{
			out.states[idx] = DepthState::invalid;
			continue;
		}
		out.z_values[idx] = entry.point.z();
		out.entries.push_back(entry);
	}
	return out;
}

} // namespace blade
