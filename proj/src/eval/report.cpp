#include "blade/eval/report.h"

#include "blade/io/plot.h"

#include <cmath>

namespace blade {

ScaleSweepReport scale_sweep_report(const std::vector<ScaleSweepFrame>& frames,
                                    const ScaleModel& fitted, const std::string& stem)
{
	ScaleSweepReport rep;
	const ScaleModel identity;

	std::vector<double> abs_unc, abs_cor;
	std::vector<SweepFrame> sweep_unc, sweep_cor;
	for (const auto& f : frames)
	{
		rep.z.push_back(f.z_gt);
		const double eu = scale_error_with_model(f.centroids, identity);
		const double ec = scale_error_with_model(f.centroids, fitted);
		rep.eps_uncorrected.push_back(eu);
		rep.eps_corrected.push_back(ec);
		abs_unc.push_back(std::abs(eu));
		abs_cor.push_back(std::abs(ec));
		sweep_unc.push_back({f.z_gt, f.z_est_uncorrected});
		sweep_cor.push_back({f.z_gt, f.z_est_corrected});
	}
	rep.median_abs_uncorrected = median(abs_unc);
	rep.median_abs_corrected = median(abs_cor);
	rep.corrected_closer_to_zero = rep.median_abs_corrected <= rep.median_abs_uncorrected;
	rep.ez_uncorrected = relative_depth_error(sweep_unc);
	rep.ez_corrected = relative_depth_error(sweep_cor);

	if (not stem.empty())
	{
		std::vector<std::vector<double>> scale_rows;
		for (std::size_t i = 0; i < frames.size(); ++i)
			scale_rows.push_back({rep.z[i], rep.eps_uncorrected[i], rep.eps_corrected[i]});
		write_tsv({"z_mm", "eps_scale_uncorrected", "eps_scale_corrected"}, scale_rows,
		          stem + "_scale.tsv");

		PlotSeries unc{"uncorrected", rep.z, rep.eps_uncorrected, 220, 60, 40};
		PlotSeries cor{"corrected", rep.z, rep.eps_corrected, 40, 90, 220};
		write_plot({unc, cor}, stem + "_scale.ppm");

		std::vector<std::vector<double>> ez_rows;
		std::vector<double> dzs, ez_u, ez_c;
		for (const auto& [dz, e] : rep.ez_uncorrected.error_by_displacement)
		{
			const double ec = rep.ez_corrected.error_by_displacement.count(dz)
			                      ? rep.ez_corrected.error_by_displacement.at(dz)
			                      : 0.0;
			ez_rows.push_back({dz, e, ec});
			dzs.push_back(dz);
			ez_u.push_back(e);
			ez_c.push_back(ec);
		}
		write_tsv({"dz_mm", "ez_uncorrected", "ez_corrected"}, ez_rows, stem + "_ez.tsv");
		PlotSeries pu{"ez uncorrected", dzs, ez_u, 220, 60, 40};
		PlotSeries pc{"ez corrected", dzs, ez_c, 40, 90, 220};
		write_plot({pu, pc}, stem + "_ez.ppm");
	}
	return rep;
}

} // namespace blade
