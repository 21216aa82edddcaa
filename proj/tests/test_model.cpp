#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blade/model/config_io.h"
#include "blade/model/projection.h"
#include "support.h"

#include "blade/core/rng.h"

#include <cmath>

using namespace blade;

namespace {

// Brute-force circle-of-confusion radius from the explicit imaging chain, used as
// an independent oracle for the affine blur model.
double coc_radius_oracle(const CameraConfig& cfg, double v, std::size_t type)
{
	const double d = cfg.mla.dist_sensor;
	const double f = cfg.types[type].focal;
	const double B = cfg.mla.diameter();
	const double a = -v * d;                  // virtual object depth in the lens frame
	const double z_img = a * f / (f - a);     // thin lens image
	return (B / 2.0) * (1.0 + d / z_img);     // cone cross-section at the sensor plane [mm], signed
}

} // namespace

TEST_CASE("thin lens maps are mutually inverse")
{
	const double f = 50.0;
	for (double z : {60.0, 100.0, 450.0, 2133.0, 10000.0})
	{
		const P3D p{3.0, -2.0, z};
		const P3D img = thin_lens_image(f, p);
		CHECK(img.z() < 0.0);
		const P3D back = thin_lens_object(f, img);
		CHECK(back.isApprox(p, 1e-12));
		// lens equation 1/z_o + 1/|z_i| = 1/f
		CHECK(1.0 / p.z() + 1.0 / -img.z() == doctest::Approx(1.0 / f).epsilon(1e-12));
	}
}

TEST_CASE("axial point at the focus distance projects to the central micro-image center")
{
	CameraConfig cfg = testing::desk_config();
	const MiaLayout mia = cfg.mia();

	// the lens whose center is nearest the optical axis
	std::size_t kc = 0, lc = 0;
	double best = 1e18;
	for (std::size_t l = 0; l < cfg.mla.rows; ++l)
		for (std::size_t k = 0; k < cfg.mla.cols; ++k)
		{
			const double n = cfg.lens_pose(k, l).translation.head<2>().norm();
			if (n < best) { best = n; kc = k; lc = l; }
		}
	REQUIRE(best < 1e-9); // desk grid is axis-centered by construction

	const double h = 2133.0;
	const auto res = project(cfg, P3D{0.0, 0.0, h}, kc, lc);
	const P2D c = mia.center(kc, lc);
	CHECK(res.feature.u == doctest::Approx(c.x()).epsilon(1e-6));
	CHECK(res.feature.v == doctest::Approx(c.y()).epsilon(1e-6));
}

TEST_CASE("blur magnitude is minimal near the nominal focus distance")
{
	// R12-E optics, h = 2133 mm: the best-focused type at h reaches its global
	// minimum |rho| within 5% of h over the working range.
	CameraConfig cfg = testing::r12e_config();
	const double h = 2133.0;
	const double vh = obj_to_v(cfg, h);

	std::size_t best_type = 0;
	double best_rho = 1e18;
	for (std::size_t i = 0; i < 3; ++i)
	{
		const double r = std::abs(virtual_depth_to_blur(cfg, vh, i));
		if (r < best_rho) { best_rho = r; best_type = i; }
	}

	double zmin = 0.0, rmin = 1e18;
	for (double z = 400.0; z <= 3000.0; z += 1.0)
	{
		const double r = std::abs(virtual_depth_to_blur(cfg, obj_to_v(cfg, z), best_type));
		if (r < rmin) { rmin = r; zmin = z; }
	}
	CHECK(std::abs(zmin - h) / h < 0.05);
}

TEST_CASE("project / back_project round trip recovers the point")
{
	CameraConfig cfg = testing::desk_config();
	REQUIRE(cfg.distortion.is_null());

	CounterRng rng(7, 0);
	int tested = 0;
	for (int trial = 0; trial < 200; ++trial)
	{
		const double z = 400.0 + 2600.0 * rng.next_double();
		const P3D p{(rng.next_double() - 0.5) * 40.0, (rng.next_double() - 0.5) * 40.0, z};
		const std::size_t k = static_cast<std::size_t>(rng.next_double() * cfg.mla.cols);
		const std::size_t l = static_cast<std::size_t>(rng.next_double() * cfg.mla.rows);

		const auto res = project(cfg, p, k, l);
		if (not res.on_sensor) continue;
		const P3D back = back_project(cfg, res.feature);
		CHECK((back - p).norm() / p.norm() < 1e-9);
		CHECK(std::abs(back.z() - p.z()) / p.z() < 1e-9);
		++tested;
	}
	CHECK(tested > 100);
}

TEST_CASE("round trip with MLA tilt and world pose")
{
	CameraConfig cfg = testing::r12e_config();
	cfg.distortion = {};
	cfg.world_pose = Rigid::from_euler(0.02, -0.01, 0.05, P3D{10.0, -20.0, 5.0});

	CounterRng rng(11, 0);
	int tested = 0;
	for (int trial = 0; trial < 100; ++trial)
	{
		const std::size_t k = 20 + static_cast<std::size_t>(rng.next_double() * 130);
		const std::size_t l = 20 + static_cast<std::size_t>(rng.next_double() * 110);
		const double z = 500.0 + 2000.0 * rng.next_double();
		// pick a world point that actually lands near this micro-image
		const P3D axis_cam{(rng.next_double() - 0.5) * 100.0, (rng.next_double() - 0.5) * 100.0, z};
		const P3D p_world = cfg.world_pose.inverse()(axis_cam);

		ProjectionResult res;
		try { res = project(cfg, p_world, k, l); }
		catch (const std::domain_error&) { continue; }
		if (not res.on_sensor) continue;

		const P3D back = back_project(cfg, res.feature);
		CHECK((back - p_world).norm() < 1e-8 * p_world.norm() + 1e-9);
		++tested;
	}
	CHECK(tested > 50);
}

TEST_CASE("projected rho matches the affine blur model exactly")
{
	CameraConfig cfg = testing::desk_config();
	CounterRng rng(3, 0);
	for (int trial = 0; trial < 50; ++trial)
	{
		const double z = 420.0 + 2500.0 * rng.next_double();
		const P3D p{(rng.next_double() - 0.5) * 30.0, (rng.next_double() - 0.5) * 30.0, z};
		const std::size_t k = static_cast<std::size_t>(rng.next_double() * cfg.mla.cols);
		const std::size_t l = static_cast<std::size_t>(rng.next_double() * cfg.mla.rows);
		const auto res = project(cfg, p, k, l);
		const double expected = virtual_depth_to_blur(cfg, res.virtual_depth, res.feature.type);
		CHECK(res.feature.rho == doctest::Approx(expected).epsilon(1e-12));
	}
}

TEST_CASE("virtual depth to blur")
{
	CameraConfig cfg = testing::r12e_config();

	SUBCASE("v to infinity tends to q_i")
	{
		for (std::size_t i = 0; i < 3; ++i)
			CHECK(virtual_depth_to_blur(cfg, 1e12, i) == doctest::Approx(cfg.types[i].q).epsilon(1e-9));
	}

	SUBCASE("zero crossing at the in-focus virtual depth, consistent with CoC geometry")
	{
		for (std::size_t i = 0; i < 3; ++i)
		{
			const double v0 = -cfg.types[i].a0 / cfg.mla.dist_sensor;
			CHECK(virtual_depth_to_blur(cfg, v0, i) == doctest::Approx(0.0).epsilon(1e-12));
			CHECK(coc_radius_oracle(cfg, v0, i) == doctest::Approx(0.0).epsilon(1e-12));
		}
	}

	SUBCASE("matches the geometric CoC oracle at any v")
	{
		CounterRng rng(5, 0);
		for (int t = 0; t < 100; ++t)
		{
			const double v = 1.05 + 25.0 * rng.next_double();
			const std::size_t i = static_cast<std::size_t>(rng.next_double() * 3);
			const double rho = virtual_depth_to_blur(cfg, v, i);
			CHECK(rho * cfg.sensor.pixel_size == doctest::Approx(coc_radius_oracle(cfg, v, i)).epsilon(1e-10));
		}
	}

	SUBCASE("inverse recovers v")
	{
		for (double v : {1.2, 2.0, 3.7, 8.0, 19.0, -4.0})
			for (std::size_t i = 0; i < 3; ++i)
				CHECK(blur_to_virtual_depth(cfg, virtual_depth_to_blur(cfg, v, i), i) ==
				      doctest::Approx(v).epsilon(1e-12));
	}

	SUBCASE("affine in 1/v: three samples determine the map")
	{
		const std::size_t i = 1;
		const double r1 = virtual_depth_to_blur(cfg, 2.0, i);
		const double r2 = virtual_depth_to_blur(cfg, 4.0, i);
		// slope and intercept from two samples reproduce the third
		const double slope = (r1 - r2) / (1.0 / 2.0 - 1.0 / 4.0);
		const double intercept = r1 - slope / 2.0;
		CHECK(slope == doctest::Approx(cfg.m).epsilon(1e-12));
		CHECK(intercept == doctest::Approx(cfg.types[i].q).epsilon(1e-12));
		CHECK(slope / 13.0 + intercept == doctest::Approx(virtual_depth_to_blur(cfg, 13.0, i)).epsilon(1e-12));
	}
}

TEST_CASE("relative blur coefficients")
{
	CameraConfig cfg = testing::r12e_config();

	SUBCASE("identical types give zero")
	{
		for (std::size_t i = 0; i < 3; ++i)
		{
			const auto c = relative_blur_coeffs(cfg, i, i);
			CHECK(c.m_ij == 0.0);
			CHECK(c.q_ij == 0.0);
		}
	}

	SUBCASE("antisymmetry")
	{
		for (std::size_t i = 0; i < 3; ++i)
			for (std::size_t j = 0; j < 3; ++j)
			{
				const auto ij = relative_blur_coeffs(cfg, i, j);
				const auto ji = relative_blur_coeffs(cfg, j, i);
				CHECK(ij.m_ij == doctest::Approx(-ji.m_ij).epsilon(1e-15));
				CHECK(ij.q_ij == doctest::Approx(-ji.q_ij).epsilon(1e-15));
			}
	}

	SUBCASE("matches brute-force r_i^2 - r_j^2 within 0.5% over v in [2, 20]")
	{
		const auto c = relative_blur_coeffs(cfg, 0, 1);
		for (double v = 2.0; v <= 20.0; v += 0.25)
		{
			const double ri = coc_radius_oracle(cfg, v, 0);
			const double rj = coc_radius_oracle(cfg, v, 1);
			const double brute = ri * ri - rj * rj;
			const double model = c.delta_r2(v);
			CHECK(std::abs(model - brute) <= 0.005 * std::abs(brute) + 1e-15);
		}
	}
}

TEST_CASE("relative blur sigma")
{
	CameraConfig cfg = testing::r12e_config();

	SUBCASE("zero at equal defocus")
	{
		// delta r^2 = 0 at v* where m_ij / v = -q_ij
		const auto c = relative_blur_coeffs(cfg, 0, 1);
		const double v_star = -c.m_ij / c.q_ij;
		REQUIRE(v_star > 0.0);
		CHECK(relative_blur_sigma(cfg, v_star, 0, 1).sigma == doctest::Approx(0.0).epsilon(1e-9));
	}

	SUBCASE("linear in kappa")
	{
		CameraConfig cfg2 = cfg;
		cfg2.blur.kappa *= 2.0;
		const auto a = relative_blur_sigma(cfg, 5.0, 0, 1);
		const auto b = relative_blur_sigma(cfg2, 5.0, 0, 1);
		CHECK(b.sigma == doctest::Approx(2.0 * a.sigma).epsilon(1e-12));
	}

	SUBCASE("hand evaluation at a chosen v")
	{
		const double v = 7.3;
		const auto c = relative_blur_coeffs(cfg, 2, 1);
		const double expected =
			cfg.blur.kappa / cfg.sensor.pixel_size * std::sqrt(std::abs(c.m_ij / v + c.q_ij));
		CHECK(relative_blur_sigma(cfg, v, 2, 1).sigma == doctest::Approx(expected).epsilon(1e-12));
	}

	SUBCASE("sharper flag flips with argument order")
	{
		for (double v : {2.5, 5.0, 15.0})
		{
			const auto ij = relative_blur_sigma(cfg, v, 0, 1);
			const auto ji = relative_blur_sigma(cfg, v, 1, 0);
			CHECK(ij.sigma == doctest::Approx(ji.sigma).epsilon(1e-12));
			if (ij.sigma > 1e-12) CHECK(ij.second_sharper != ji.second_sharper);
		}
	}
}

TEST_CASE("disparity")
{
	CameraConfig cfg = testing::desk_config();
	const MiaLayout mia = cfg.mia();
	const std::size_t rk = 10, rl = 10, tk = 11, tl = 10;
	const P2D baseline = mia.center(tk, tl) - mia.center(rk, rl);

	SUBCASE("approximate form at v = 1 equals the MLA-plane baseline")
	{
		const P2D d = disparity(mia, rk, rl, tk, tl, 1.0, DisparityMode::approximate);
		CHECK(d.isApprox(baseline / mia.lambda, 1e-12));
	}

	SUBCASE("corrected form tends to (1 - lambda) B' as v grows")
	{
		const P2D d = disparity(mia, rk, rl, tk, tl, 1e9, DisparityMode::corrected);
		CHECK(d.isApprox(baseline * (1.0 - mia.lambda), 1e-6));
	}

	SUBCASE("corrected and approximate forms agree algebraically when lambda -> 1")
	{
		MiaLayout unit = mia;
		unit.lambda = 1.0;
		for (double v : {1.3, 2.0, 8.0})
		{
			const P2D a = disparity(unit, rk, rl, tk, tl, v, DisparityMode::approximate);
			const P2D c = disparity(unit, rk, rl, tk, tl, v, DisparityMode::corrected);
			CHECK(a.isApprox(c, 1e-12));
		}
	}

	SUBCASE("raw warp shift plus disparity equals the micro-image baseline")
	{
		for (double v : {1.5, 3.0, 12.0})
		{
			const P2D d = disparity(mia, rk, rl, tk, tl, v);
			const P2D w = raw_warp_shift(mia, rk, rl, tk, tl, v);
			CHECK((d + w).isApprox(baseline, 1e-12));
		}
	}
}

TEST_CASE("apply scale")
{
	CameraConfig cfg = testing::r12e_config();

	SUBCASE("identity model leaves the point unchanged")
	{
		const P3D p{10.0, -4.0, 1000.0};
		CHECK(apply_scale(cfg, p) == p);
	}

	SUBCASE("quadratic coefficients evaluated by direct polynomial evaluation")
	{
		cfg.scale.kind = ScaleKind::quadratic;
		cfg.scale.gamma2 = 2.7355268379573649e-5;
		cfg.scale.gamma1 = 0.88338184462070446;
		cfg.scale.gamma0 = 10.90983152629782;
		const double z = 1000.0;
		const double gamma = (cfg.scale.gamma2 * z * z + cfg.scale.gamma1 * z + cfg.scale.gamma0) / z;
		const P3D p{5.0, 2.0, z};
		const P3D out = apply_scale(cfg, p);
		CHECK(out.x() == doctest::Approx(5.0 * gamma).epsilon(1e-12));
		CHECK(out.z() == doctest::Approx(z * gamma).epsilon(1e-12));
	}

	SUBCASE("linear model is affine in z on the optical axis")
	{
		cfg.scale.kind = ScaleKind::linear;
		cfg.scale.gamma2 = 0.0;
		cfg.scale.gamma1 = 0.9;
		cfg.scale.gamma0 = 12.0;
		auto out_z = [&](double z) { return apply_scale(cfg, P3D{0, 0, z}).z(); };
		const double d1 = out_z(600.0) - out_z(500.0);
		const double d2 = out_z(1100.0) - out_z(1000.0);
		CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
	}
}

TEST_CASE("tilt approximation bound")
{
	CameraConfig cfg = testing::r12e_config();

	SUBCASE("zero tilt gives zero error")
	{
		const auto r = check_disparity_approximation(cfg, 0.0, 5);
		CHECK(r.direct == 0.0);
		CHECK(r.closed_form == 0.0);
	}

	SUBCASE("closed form matches direct evaluation within 1e-10")
	{
		for (double alpha = 5e-5; alpha <= 5e-4 + 1e-12; alpha += 5e-5)
			for (int n = 1; n <= 10; ++n)
			{
				const auto r = check_disparity_approximation(cfg, alpha, n);
				CHECK(std::abs(r.direct - r.closed_form) < 1e-10);
			}
	}

	SUBCASE("alpha = 0.0005 spans [0.0125%, 0.2375%] over n in 1..10")
	{
		const double alpha = 5e-4;
		double lo = 1e18, hi = 0.0;
		for (int n = 1; n <= 10; ++n)
		{
			const auto r = check_disparity_approximation(cfg, alpha, n);
			lo = std::min(lo, r.direct);
			hi = std::max(hi, r.direct);
			CHECK(r.direct >= 0.0125e-2 * 0.999);
			CHECK(r.direct <= 0.2375e-2 * 1.001);
		}
		CHECK(lo == doctest::Approx(0.0125e-2).epsilon(1e-3));
		CHECK(hi == doctest::Approx(0.2375e-2).epsilon(1e-3));
	}
}

TEST_CASE("camera config io")
{
	CameraConfig cfg = testing::r12e_config();
	cfg.scale.kind = ScaleKind::quadratic;
	cfg.scale.gamma2 = 4.6169969732325145e-5;
	cfg.scale.gamma1 = 0.91160914393108972;
	cfg.scale.gamma0 = -2.004049745583496;

	const std::string text = serialize_camera_config(cfg);
	const CameraConfig back = parse_camera_config(text);

	CHECK(back.main_lens.focal == cfg.main_lens.focal);
	CHECK(back.mla.pitch == cfg.mla.pitch);
	CHECK(back.mla.dist_sensor == cfg.mla.dist_sensor);
	CHECK(back.types[2].focal == cfg.types[2].focal);
	CHECK(back.m == doctest::Approx(cfg.m).epsilon(1e-15));
	CHECK(back.lambda == doctest::Approx(cfg.lambda).epsilon(1e-15));
	CHECK(back.scale.gamma2 == cfg.scale.gamma2);
	CHECK(back.distortion.q1 == cfg.distortion.q1);

	SUBCASE("tampered derived section is rejected")
	{
		std::string bad = text;
		const auto pos = bad.find("m = ");
		REQUIRE(pos != std::string::npos);
		bad.replace(pos, 4, "m = 1.0 #");
		CHECK_THROWS(parse_camera_config(bad));
	}

	SUBCASE("invariant violations are rejected")
	{
		CameraConfig broken = cfg;
		broken.main_lens.focal = -1.0;
		CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

		CameraConfig wrong_scale = cfg;
		wrong_scale.scale.kind = ScaleKind::identity; // but gammas are not (0, 1, 0)
		CHECK_THROWS_AS(wrong_scale.validate(), std::invalid_argument);
	}
}

TEST_CASE("mia layout")
{
	CameraConfig cfg = testing::desk_config();
	const MiaLayout mia = cfg.mia();

	SUBCASE("centers lie inside the sensor and lambda is in (0, 1)")
	{
		CHECK(mia.lambda > 0.0);
		CHECK(mia.lambda < 1.0);
		for (const auto& c : mia.centers)
		{
			CHECK(c.x() >= 0.0);
			CHECK(c.y() >= 0.0);
			CHECK(c.x() < static_cast<double>(cfg.sensor.width));
			CHECK(c.y() < static_cast<double>(cfg.sensor.height));
		}
	}

	SUBCASE("pixel-to-lens lookup agrees with exhaustive search")
	{
		CounterRng rng(13, 0);
		for (int t = 0; t < 200; ++t)
		{
			const P2D p{rng.next_double() * (cfg.sensor.width - 1.0),
			            rng.next_double() * (cfg.sensor.height - 1.0)};
			std::size_t k = 0, l = 0;
			const bool found = mia.lens_of_pixel(p, k, l);

			double best = 1e18;
			std::size_t bk = 0, bl = 0;
			for (std::size_t ll = 0; ll < mia.rows; ++ll)
				for (std::size_t kk = 0; kk < mia.cols; ++kk)
				{
					const double d = (mia.center(kk, ll) - p).norm();
					if (d < best) { best = d; bk = kk; bl = ll; }
				}
			CHECK(found == (best <= mia.radius));
			if (found)
			{
				CHECK(k == bk);
				CHECK(l == bl);
			}
		}
	}

	SUBCASE("same-type nearest baseline is sqrt(3) times the pitch")
	{
		// hexagonal grid with three types: nearest same-type lens sits at 2 sin(pi/3) pitch
		const std::size_t k0 = 10, l0 = 10;
		const std::size_t t0 = cfg.mla.type_of(k0, l0);
		const P3D p0 = cfg.mla.node(k0, l0);
		double nearest = 1e18;
		for (std::size_t l = 0; l < cfg.mla.rows; ++l)
			for (std::size_t k = 0; k < cfg.mla.cols; ++k)
			{
				if (k == k0 and l == l0) continue;
				if (cfg.mla.type_of(k, l) != t0) continue;
				nearest = std::min(nearest, (cfg.mla.node(k, l) - p0).norm());
			}
		CHECK(nearest == doctest::Approx(2.0 * std::sin(M_PI / 3.0) * cfg.mla.pitch).epsilon(1e-9));
	}

	SUBCASE("all six direct neighbors have different types")
	{
		const long k0 = 10, l0 = 10; // even row
		const std::size_t t0 = cfg.mla.type_of(k0, l0);
		const long neigh[6][2] = {{k0 - 1, l0}, {k0 + 1, l0}, {k0 - 1, l0 - 1}, {k0, l0 - 1},
		                          {k0 - 1, l0 + 1}, {k0, l0 + 1}};
		for (const auto& n : neigh)
			CHECK(cfg.mla.type_of(n[0], n[1]) != t0);
	}
}
