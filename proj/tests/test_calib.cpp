#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blade/calib/extrinsics.h"
#include "blade/calib/invdist.h"
#include "blade/calib/obs_io.h"
#include "blade/calib/scale.h"
#include "blade/core/rng.h"
#include "blade/model/projection.h"
#include "support.h"

#include <cstdio>
#include <fstream>

using namespace blade;

namespace {

// R12-A distortion, the strongest of the calibrated setups.
DistortionParams r12a_distortion()
{
	return {24.629793152694231e-5, -3.0321615240649705e-6, 1.0948876088478752e-8,
	        -11.07331475272971e-5, -3.5990205496035423e-5};
}

// Synthesize the observation clusters of a fronto-planar checkerboard through every
// micro-lens that sees each corner.
ScaleObservation synth_checkerboard_obs(const CameraConfig& cfg, double z, std::size_t cols,
                                        std::size_t rows, double spacing)
{
	const MiaLayout mia = cfg.mia();
	ScaleObservation obs;
	obs.grid_cols = cols;
	obs.grid_rows = rows;
	obs.grid_spacing = spacing;
	obs.nominal_z = z;
	obs.clusters.resize(cols * rows);

	const double x0 = -0.5 * spacing * static_cast<double>(cols - 1);
	const double y0 = -0.5 * spacing * static_cast<double>(rows - 1);
	for (std::size_t cy = 0; cy < rows; ++cy)
		for (std::size_t cx = 0; cx < cols; ++cx)
		{
			const P3D corner{x0 + spacing * static_cast<double>(cx),
			                 y0 + spacing * static_cast<double>(cy), z};
			auto& cluster = obs.clusters[cy * cols + cx];
			for (std::size_t l = 0; l < cfg.mla.rows; ++l)
				for (std::size_t k = 0; k < cfg.mla.cols; ++k)
				{
					const auto res = project(cfg, corner, k, l);
					if (not res.on_sensor) continue;
					if ((P2D{res.feature.u, res.feature.v} - mia.center(k, l)).norm() <= mia.radius)
						cluster.push_back(res.feature);
				}
		}
	return obs;
}

} // namespace

TEST_CASE("inverse distortion calibration")
{
	SUBCASE("zero direct distortion converges immediately to zero coefficients")
	{
		InverseDistortionReport report;
		const auto inv = calibrate_inverse_distortion({}, SamplingVolume{}, report);
		CHECK(report.iterations <= 2);
		CHECK(report.rmse < 1e-12);
		CHECK(std::abs(inv.q1) < 1e-12);
		CHECK(std::abs(inv.p2) < 1e-12);
	}

	SUBCASE("published coefficients converge in under fifteen iterations")
	{
		InverseDistortionReport report;
		const auto inv = calibrate_inverse_distortion(r12a_distortion(), SamplingVolume{}, report);
		CHECK(report.converged);
		CHECK(report.iterations < 15);
		CHECK(report.rmse <= 1e-4);

		// first-order series inversion of the Brown model flips the radial signs
		const auto direct = r12a_distortion();
		CHECK(inv.q1 * direct.q1 < 0.0);
		CHECK(inv.q2 * direct.q2 < 0.0);
		CHECK(inv.q3 * direct.q3 < 0.0);
		CHECK(inv.p1 * direct.p1 < 0.0);
		CHECK(inv.p2 * direct.p2 < 0.0);
		CHECK(std::abs(inv.q1 + direct.q1) < 0.05 * std::abs(direct.q1));
	}

	SUBCASE("pure small radial model inverts to minus the coefficient at first order")
	{
		// series oracle: x_u = x_d (1 - q1 s^2 + O(s^4)) for x_d = x (1 + q1 s^2)
		DistortionParams direct;
		direct.q1 = 1e-5;
		SamplingVolume vol;
		vol.lo = {-2.0, -2.0, -55.0};
		vol.hi = {2.0, 2.0, -52.0};
		InverseDistortionReport report;
		const auto inv = calibrate_inverse_distortion(direct, vol, report);
		CHECK(inv.q1 == doctest::Approx(-direct.q1).epsilon(1e-3));
	}

	SUBCASE("degenerate volume is rejected")
	{
		SamplingVolume vol;
		vol.hi = vol.lo;
		InverseDistortionReport report;
		CHECK_THROWS_AS(calibrate_inverse_distortion(r12a_distortion(), vol, report),
		                std::invalid_argument);
	}
}

TEST_CASE("cluster centroid")
{
	CameraConfig cfg = testing::desk_config();
	const P3D corner{4.0, -6.0, 900.0};
	const auto res = project(cfg, corner, 16, 14);
	REQUIRE(res.on_sensor);

	SUBCASE("single element equals its back projection")
	{
		const P3D c = compute_cluster_centroid(cfg, {res.feature});
		CHECK(c.isApprox(back_project(cfg, res.feature), 1e-12));
	}

	SUBCASE("duplicated feature leaves the centroid unchanged")
	{
		const P3D one = compute_cluster_centroid(cfg, {res.feature});
		const P3D two = compute_cluster_centroid(cfg, {res.feature, res.feature});
		CHECK(one.isApprox(two, 1e-14));
	}

	SUBCASE("noiseless synthetic cluster matches the ground-truth corner")
	{
		const auto obs = synth_checkerboard_obs(cfg, 900.0, 3, 2, 8.0);
		for (std::size_t c = 0; c < obs.clusters.size(); ++c)
		{
			REQUIRE(obs.clusters[c].size() >= 3);
			const P3D centroid = compute_cluster_centroid(cfg, obs.clusters[c]);
			const double x0 = -0.5 * 8.0 * 2.0, y0 = -0.5 * 8.0;
			const P3D gt{x0 + 8.0 * static_cast<double>(c % 3), y0 + 8.0 * static_cast<double>(c / 3), 900.0};
			CHECK((centroid - gt).norm() < 1e-6);
		}
	}

	SUBCASE("empty cluster is an error")
	{
		CHECK_THROWS_AS(compute_cluster_centroid(cfg, {}), std::invalid_argument);
	}
}

TEST_CASE("scale error")
{
	ScaleObservation frame;
	frame.grid_cols = 3;
	frame.grid_rows = 2;
	frame.grid_spacing = 10.0;

	std::vector<P3D> exact;
	for (std::size_t cy = 0; cy < 2; ++cy)
		for (std::size_t cx = 0; cx < 3; ++cx)
			exact.emplace_back(10.0 * cx, 10.0 * cy, 700.0);

	SUBCASE("exact centroids give zero")
	{
		CHECK(scale_error(exact, frame) == doctest::Approx(0.0).epsilon(1e-15));
	}

	SUBCASE("uniform shrink by 0.9 gives 0.1")
	{
		P3D mean = P3D::Zero();
		for (const auto& p : exact) mean += p;
		mean /= static_cast<double>(exact.size());
		std::vector<P3D> shrunk;
		for (const auto& p : exact) shrunk.push_back(mean + 0.9 * (p - mean));
		CHECK(scale_error(shrunk, frame) == doctest::Approx(0.1).epsilon(1e-12));
	}

	SUBCASE("invariant to rigid motion of the centroid set")
	{
		CounterRng rng(21, 0);
		for (int t = 0; t < 20; ++t)
		{
			const Rigid motion = Rigid::from_euler(rng.next_double(), rng.next_double(),
			                                       rng.next_double(),
			                                       P3D{rng.next_double() * 100.0,
			                                           rng.next_double() * 100.0,
			                                           rng.next_double() * 100.0});
			std::vector<P3D> mixed, moved;
			for (const auto& p : exact) mixed.push_back(p + P3D{0.1 * p.y(), 0.0, 0.02 * p.x()});
			for (const auto& p : mixed) moved.push_back(motion(p));
			CHECK(scale_error(moved, frame) == doctest::Approx(scale_error(mixed, frame)).epsilon(1e-9));
		}
	}

	SUBCASE("coincident ground truth points are an error")
	{
		CHECK_THROWS_AS(scale_error(exact, [](std::size_t, std::size_t) { return 0.0; }),
		                std::invalid_argument);
	}
}

TEST_CASE("scale model fit")
{
	// generate-then-fit oracle: centroids synthesized from a known quadratic Gamma
	const ScaleModel truth{ScaleKind::quadratic, 35.91, 0.6666, 14.43e-5};

	auto unscaled_z = [&](double z_true) {
		// positive root of g2 z^2 + g1 z + (g0 - z_true) = 0
		const double a = truth.gamma2, b = truth.gamma1, c = truth.gamma0 - z_true;
		return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
	};

	auto make_frame = [&](double z_true, double tilt) {
		CentroidFrame frame;
		std::vector<P3D> gt;
		for (int cy = 0; cy < 3; ++cy)
			for (int cx = 0; cx < 4; ++cx)
				gt.emplace_back(12.0 * (cx - 1.5), 12.0 * (cy - 1.0) + tilt * cx, z_true + tilt * 3.0 * cy);
		for (const auto& p : gt)
		{
			const double zu = unscaled_z(p.z());
			frame.centroids.push_back(p * (zu / p.z()));
		}
		for (std::size_t i = 0; i < gt.size(); ++i)
			for (std::size_t j = i + 1; j < gt.size(); ++j)
				frame.gt_distances.push_back((gt[i] - gt[j]).norm());
		frame.nominal_z = z_true;
		return frame;
	};

	std::vector<CentroidFrame> frames;
	for (double z : {500.0, 800.0, 1100.0, 1400.0, 1700.0}) frames.push_back(make_frame(z, 0.0));
	frames.push_back(make_frame(950.0, 2.0));

	SUBCASE("recovers the generating coefficients within 1%")
	{
		ScaleFitReport report;
		const ScaleModel fit = fit_scale_model(frames, ScaleKind::quadratic, report);
		CHECK(report.converged);
		CHECK(std::abs(fit.gamma0 - truth.gamma0) < 0.01 * std::abs(truth.gamma0));
		CHECK(std::abs(fit.gamma1 - truth.gamma1) < 0.01 * std::abs(truth.gamma1));
		CHECK(std::abs(fit.gamma2 - truth.gamma2) < 0.01 * std::abs(truth.gamma2));
		CHECK(report.median_abs_error < 1e-8);
	}

	SUBCASE("accepted steps never increase the cost")
	{
		ScaleFitReport report;
		fit_scale_model(frames, ScaleKind::quadratic, report);
		CHECK(report.final_cost <= report.initial_cost);
	}

	SUBCASE("linear fit on quadratic data is worse than the quadratic fit")
	{
		ScaleFitReport quad_report, lin_report;
		fit_scale_model(frames, ScaleKind::quadratic, quad_report);
		fit_scale_model(frames, ScaleKind::linear, lin_report);
		CHECK(lin_report.median_abs_error >= quad_report.median_abs_error);
		CHECK(lin_report.final_cost > quad_report.final_cost);
	}

	SUBCASE("identity-scale data returns a model close to identity")
	{
		std::vector<CentroidFrame> id_frames;
		for (double z : {500.0, 900.0, 1300.0, 1700.0})
		{
			CentroidFrame f;
			std::vector<P3D> gt;
			for (int cy = 0; cy < 3; ++cy)
				for (int cx = 0; cx < 3; ++cx)
					gt.emplace_back(10.0 * cx, 10.0 * cy, z);
			f.centroids = gt;
			for (std::size_t i = 0; i < gt.size(); ++i)
				for (std::size_t j = i + 1; j < gt.size(); ++j)
					f.gt_distances.push_back((gt[i] - gt[j]).norm());
			id_frames.push_back(std::move(f));
		}
		ScaleFitReport report;
		const ScaleModel fit = fit_scale_model(id_frames, ScaleKind::quadratic, report);
		CHECK(std::abs(fit.gamma2) < 1e-8);
		CHECK(std::abs(fit.gamma1 - 1.0) < 1e-3);
		CHECK(std::abs(fit.gamma0) < 1.0);
	}

	SUBCASE("single-depth data is rejected as rank deficient")
	{
		std::vector<CentroidFrame> flat{frames[0], frames[0], frames[0]};
		for (auto& f : flat)
			for (auto& c : f.centroids) c.z() = 700.0;
		ScaleFitReport report;
		CHECK_THROWS_AS(fit_scale_model(flat, ScaleKind::quadratic, report), std::invalid_argument);
	}
}

TEST_CASE("full scale calibration from synthetic observations")
{
	CameraConfig cfg = testing::desk_config();
	std::vector<ScaleObservation> observations;
	for (double z : {600.0, 900.0, 1200.0, 1500.0})
		observations.push_back(synth_checkerboard_obs(cfg, z, 3, 2, 9.0));

	// model-exact observations carry no scale error: the fit must stay near identity
	ScaleFitReport report;
	const ScaleModel fit = calibrate_scale_model(observations, cfg, ScaleKind::quadratic, report);
	CHECK(std::abs(fit.gamma2) < 1e-8);
	CHECK(std::abs(fit.gamma1 - 1.0) < 1e-3);
	CHECK(std::abs(fit.gamma0) < 1.0);
	CHECK(report.median_abs_error < 1e-4);
}

TEST_CASE("constellation registration")
{
	CameraConfig cfg = testing::desk_config();
	const MiaLayout mia = cfg.mia();

	auto make_constellation = [&](const Rigid& cam_from_ext, double noise_px, std::uint64_t seed) {
		// five spread targets in the external frame, mapped into the camera frame by
		// cam_from_ext, observed through every micro-lens that sees them
		PointConstellation con;
		con.points = {{-15.0, -10.0, 620.0}, {18.0, -12.0, 750.0}, {0.0, 14.0, 900.0},
		              {-20.0, 16.0, 1100.0}, {22.0, 18.0, 1350.0}};
		CounterRng rng(seed, 99);
		for (const auto& p : con.points) // camera-frame positions, observed directly
		{
			con.clusters.emplace_back();
			for (std::size_t l = 0; l < cfg.mla.rows; ++l)
				for (std::size_t k = 0; k < cfg.mla.cols; ++k)
				{
					auto res = project(cfg, p, k, l);
					if (not res.on_sensor) continue;
					if ((P2D{res.feature.u, res.feature.v} - mia.center(k, l)).norm() > mia.radius)
						continue;
					res.feature.u += noise_px * rng.next_normal();
					res.feature.v += noise_px * rng.next_normal();
					con.clusters.back().push_back(res.feature);
				}
			REQUIRE(con.clusters.back().size() >= 3);
		}
		// external-frame coordinates of the targets
		const Rigid ext_from_cam = cam_from_ext.inverse();
		for (auto& p : con.points) p = ext_from_cam(p);
		return con;
	};

	SUBCASE("self registration recovers the identity")
	{
		const auto con = make_constellation(Rigid::identity(), 0.0, 1);
		const auto result = register_constellation(cfg, con);
		CHECK(result.cam_from_ext.axis_angle().norm() < 1e-6);
		CHECK(result.cam_from_ext.translation.norm() < 1e-6);
		CHECK(result.refined_rmse < 1e-6);
	}

	SUBCASE("random rigid transform recovered to 1e-4 rad / 1e-2 mm")
	{
		CounterRng rng(31, 7);
		for (int trial = 0; trial < 3; ++trial)
		{
			const Rigid truth = Rigid::from_euler(0.2 * (rng.next_double() - 0.5),
			                                      0.2 * (rng.next_double() - 0.5),
			                                      0.5 * (rng.next_double() - 0.5),
			                                      P3D{30.0 * (rng.next_double() - 0.5),
			                                          30.0 * (rng.next_double() - 0.5),
			                                          60.0 * (rng.next_double() - 0.5)});
			const auto con = make_constellation(truth, 0.0, 100 + trial);
			const auto result = register_constellation(cfg, con);

			const Rigid err = result.cam_from_ext * truth.inverse();
			CHECK(err.axis_angle().norm() < 1e-4);
			// compare action on the points rather than raw translation
			for (const auto& p : con.points)
				CHECK((result.cam_from_ext(p) - truth(p)).norm() < 1e-2);
		}
	}

	SUBCASE("with observation noise the refinement beats the PnP initialization")
	{
		const auto con = make_constellation(
			Rigid::from_euler(0.05, -0.03, 0.1, P3D{10.0, -8.0, 20.0}), 0.5, 77);
		const auto result = register_constellation(cfg, con);
		CHECK(result.refined_rmse < result.pnp_rmse);
	}

	SUBCASE("frame-choice invariance of the registered camera-frame points")
	{
		const Rigid truth = Rigid::from_euler(0.04, 0.02, -0.06, P3D{5.0, 12.0, -15.0});
		const auto con = make_constellation(truth, 0.0, 55);
		const auto base = register_constellation(cfg, con);

		// re-express the constellation in another external frame
		const Rigid shuffle = Rigid::from_euler(0.3, -0.2, 0.15, P3D{100.0, -50.0, 80.0});
		PointConstellation moved = con;
		for (auto& p : moved.points) p = shuffle(p);
		const auto alt = register_constellation(cfg, moved);

		for (std::size_t i = 0; i < con.points.size(); ++i)
		{
			const P3D a = base.cam_from_ext(con.points[i]);
			const P3D b = alt.cam_from_ext(moved.points[i]);
			CHECK((a - b).norm() < 1e-6);
		}
	}

	SUBCASE("too few points are rejected")
	{
		PointConstellation con;
		con.points = {{0, 0, 500}, {10, 0, 500}, {0, 10, 500}};
		con.clusters.resize(3);
		CHECK_THROWS_AS(register_constellation(cfg, con), std::invalid_argument);
	}
}

TEST_CASE("observation and constellation file round trips")
{
	CameraConfig cfg = testing::desk_config();

	SUBCASE("observations")
	{
		std::vector<ScaleObservation> obs;
		obs.push_back(synth_checkerboard_obs(cfg, 700.0, 3, 2, 9.0));
		obs.push_back(synth_checkerboard_obs(cfg, 1200.0, 3, 2, 9.0));
		obs[0].nominal_z = 700.0;

		const char* path = "obs_roundtrip.txt";
		save_observations(obs, path);
		const auto back = load_observations(path);
		std::remove(path);

		REQUIRE(back.size() == obs.size());
		for (std::size_t n = 0; n < obs.size(); ++n)
		{
			CHECK(back[n].grid_cols == obs[n].grid_cols);
			CHECK(back[n].grid_spacing == obs[n].grid_spacing);
			REQUIRE(back[n].clusters.size() == obs[n].clusters.size());
			for (std::size_t c = 0; c < obs[n].clusters.size(); ++c)
			{
				REQUIRE(back[n].clusters[c].size() == obs[n].clusters[c].size());
				for (std::size_t i = 0; i < obs[n].clusters[c].size(); ++i)
				{
					CHECK(back[n].clusters[c][i].u == obs[n].clusters[c][i].u); // bit exact
					CHECK(back[n].clusters[c][i].rho == obs[n].clusters[c][i].rho);
					CHECK(back[n].clusters[c][i].k == obs[n].clusters[c][i].k);
					CHECK(back[n].clusters[c][i].type == obs[n].clusters[c][i].type);
				}
			}
		}
	}

	SUBCASE("constellations")
	{
		PointConstellation con;
		con.points = {{1.0 / 3.0, -2.0, 700.0}, {5.5, 3.25, 800.0}, {0.1, 0.2, 900.0},
		              {-4.0, 1.0, 1000.0}};
		con.clusters.resize(4);
		const auto res = project(cfg, P3D{1.0 / 3.0, -2.0, 700.0}, 16, 14);
		con.clusters[0].push_back(res.feature);

		const char* path = "con_roundtrip.txt";
		save_constellation(con, path);
		const auto back = load_constellation(path);
		std::remove(path);

		REQUIRE(back.points.size() == 4);
		CHECK(back.points[0].x() == con.points[0].x());
		CHECK(back.clusters[0][0].u == con.clusters[0][0].u);
		CHECK(back.clusters[0][0].rho == con.clusters[0][0].rho);
	}
}
