#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blade/calib/scale.h"
#include "blade/core/parallel.h"
#include "blade/model/projection.h"
#include "blade/sim/export.h"
#include "support.h"

#include <cmath>
#include <cstdio>

using namespace blade;

namespace {

Scene checkerboard_scene(double z, double square = 8.0, std::size_t cx = 4, std::size_t cy = 3)
{
	Scene scene;
	SceneObject board;
	board.kind = SceneObject::Kind::checkerboard;
	board.pose = Rigid::from_euler(0, 0, 0, P3D{0.0, 0.0, z});
	board.corners_x = cx;
	board.corners_y = cy;
	board.square = square;
	scene.objects.push_back(board);
	scene.background_depth = 4000.0;
	scene.background.kind = Texture::Kind::uniform;
	scene.background.value = 0.5;
	return scene;
}

double laplacian_energy(const ImageF& img, const P2D& center, double radius)
{
	const ImageF lap = laplacian(img);
	double acc = 0.0;
	std::size_t n = 0;
	for (long y = std::lround(center.y() - radius); y <= std::lround(center.y() + radius); ++y)
		for (long x = std::lround(center.x() - radius); x <= std::lround(center.x() + radius); ++x)
		{
			if (x < 0 or y < 0 or x >= static_cast<long>(img.width()) or
			    y >= static_cast<long>(img.height()))
				continue;
			const P2D p{static_cast<double>(x), static_cast<double>(y)};
			if ((p - center).norm() > radius) continue;
			const double v = lap(x, y);
			acc += v * v;
			++n;
		}
	return n ? acc / static_cast<double>(n) : 0.0;
}

} // namespace

TEST_CASE("rendering basics")
{
	CameraConfig cfg = testing::desk_config(17, 14, 410, 300);
	const Scene scene = checkerboard_scene(800.0, 10.0);

	RenderSettings rs;
	rs.aperture = ApertureMode::pinhole;
	const auto res = render(scene, cfg, rs);

	SUBCASE("intensities bounded by the texture range, no negatives")
	{
		float lo = 1e9f, hi = -1e9f;
		for (const float v : res.raw.data())
		{
			lo = std::min(lo, v);
			hi = std::max(hi, v);
		}
		CHECK(lo >= 0.f);
		CHECK(hi <= 0.9f + 1e-6f);
		CHECK(hi > 0.5f); // board content reached the sensor
	}

	SUBCASE("ground truth v is consistent with the thin-lens chain")
	{
		for (std::size_t i = 0; i < res.gt.z.size(); i += 97)
		{
			if (not res.gt.valid[i]) continue;
			CHECK(res.gt.v[i] ==
			      doctest::Approx(obj_to_v(cfg, res.gt.z[i])).epsilon(1e-6));
		}
	}

	SUBCASE("ground truth is independent of the texture")
	{
		Scene fine = scene;
		fine.objects[0].square = 5.0; // doubles the texture frequency
		fine.objects[0].corners_x = 8;
		fine.objects[0].corners_y = 6;
		const auto res2 = render(fine, cfg, rs);
		for (std::size_t i = 0; i < res.gt.z.size(); i += 53)
		{
			CHECK(res.gt.valid[i] == res2.gt.valid[i]);
			if (res.gt.valid[i]) CHECK(res.gt.z[i] == doctest::Approx(res2.gt.z[i]).epsilon(1e-9));
		}
	}

	SUBCASE("fixed seed renders are bit identical across thread counts")
	{
		RenderSettings full;
		full.aperture = ApertureMode::full;
		full.rays = 16;
		full.noise_sigma = 0.01;
		full.seed = 42;
		set_thread_count(1);
		const auto a = render(scene, cfg, full);
		set_thread_count(4);
		const auto b = render(scene, cfg, full);
		set_thread_count(0);
		REQUIRE(a.raw.data().size() == b.raw.data().size());
		for (std::size_t i = 0; i < a.raw.data().size(); ++i)
			CHECK(a.raw.data()[i] == b.raw.data()[i]);
	}

	SUBCASE("distorted configurations are rejected")
	{
		CameraConfig bad = cfg;
		bad.distortion.q1 = 1e-5;
		CHECK_THROWS_AS(render(scene, bad, rs), std::invalid_argument);
	}
}

TEST_CASE("per-type sharpness at the type focus distance")
{
	CameraConfig cfg = testing::desk_config(17, 14, 410, 300);
	const MiaLayout mia = cfg.mia();

	for (std::size_t focus_type = 0; focus_type < 3; ++focus_type)
	{
		const double z_focus = v_to_obj(cfg, cfg.types[focus_type].focus_v);
		Scene scene = checkerboard_scene(z_focus, z_focus * 5e-3);

		RenderSettings rs;
		rs.aperture = ApertureMode::pinhole;
		rs.psf = PsfMode::gaussian; // analytic defocus per micro-image
		const auto res = render(scene, cfg, rs);

		// mean Laplacian energy per type over central micro-images
		double energy[3] = {0, 0, 0};
		int counts[3] = {0, 0, 0};
		for (std::size_t l = 4; l < 10; ++l)
			for (std::size_t k = 4; k < 13; ++k)
			{
				const std::size_t t = cfg.mla.type_of(k, l);
				energy[t] += laplacian_energy(res.raw, mia.center(k, l), mia.radius - 2.0);
				counts[t] += 1;
			}
		for (int t = 0; t < 3; ++t)
		{
			REQUIRE(counts[t] > 0);
			energy[t] /= counts[t];
		}
		for (std::size_t t = 0; t < 3; ++t)
			if (t != focus_type) CHECK(energy[focus_type] >= energy[t]);
	}
}

TEST_CASE("full aperture rendering exhibits the depth scaling phenomenon")
{
	// off-focus frames reconstruct too far (objects appear bigger): negative scale
	// error, growing away from the focus distance
	CameraConfig cfg = testing::desk_config(21, 18, 504, 380);

	RenderSettings full;
	full.aperture = ApertureMode::full;
	full.rays = 512;
	full.seed = 7;

	auto scale_error_at = [&](double z) {
		const Scene scene = checkerboard_scene(z, 8.0, 4, 3);
		const auto obs = export_observations(scene, cfg, full);
		const CentroidFrame frame = make_centroid_frame(cfg, obs);
		return scale_error_with_model(frame, ScaleModel{});
	};

	const double e700 = scale_error_at(700.0);
	const double e1200 = scale_error_at(1200.0);
	CHECK(e700 < 0.0);
	CHECK(e1200 < 0.0);
	CHECK(std::abs(e700) > std::abs(e1200)); // farther from focus (2133 mm) is worse

	// pinhole observations carry no scale error
	RenderSettings pin;
	pin.aperture = ApertureMode::pinhole;
	const Scene scene = checkerboard_scene(700.0, 8.0, 4, 3);
	const auto obs = export_observations(scene, cfg, pin);
	const CentroidFrame frame = make_centroid_frame(cfg, obs);
	CHECK(std::abs(scale_error_with_model(frame, ScaleModel{})) < 1e-4);
	CHECK(std::abs(scale_error_with_model(frame, ScaleModel{})) < std::abs(e700));
}

TEST_CASE("observation export")
{
	CameraConfig cfg = testing::desk_config(17, 14, 410, 300);

	SUBCASE("central corner cluster is well observed")
	{
		const Scene scene = checkerboard_scene(800.0);
		RenderSettings rs;
		const auto obs = export_observations(scene, cfg, rs);
		REQUIRE(obs.clusters.size() == 12);
		for (const auto& cluster : obs.clusters) CHECK(cluster.size() >= 3);
	}

	SUBCASE("pinhole clusters back-project onto the corners")
	{
		const Scene scene = checkerboard_scene(900.0);
		RenderSettings rs;
		const auto obs = export_observations(scene, cfg, rs);
		const auto corners = scene.objects[0].corner_points();
		for (std::size_t i = 0; i < corners.size(); ++i)
		{
			const P3D centroid = compute_cluster_centroid(cfg, obs.clusters[i]);
			CHECK((centroid - corners[i]).norm() < 1e-3);
		}
	}

	SUBCASE("scene without a checkerboard is rejected")
	{
		Scene empty;
		empty.background_depth = 2000.0;
		RenderSettings rs;
		CHECK_THROWS_AS(export_observations(empty, cfg, rs), std::invalid_argument);
	}
}

TEST_CASE("point cloud export")
{
	CameraConfig cfg = testing::desk_config(17, 14, 410, 300);
	Scene scene;
	SceneObject plane;
	plane.kind = SceneObject::Kind::plane;
	plane.pose = Rigid::from_euler(0, 0, 0, P3D{0.0, 0.0, 900.0});
	plane.size_x = plane.size_y = 4000.0;
	plane.texture.kind = Texture::Kind::noise;
	plane.texture.scale = 4.0;
	scene.objects.push_back(plane);
	scene.background_depth = 4000.0;

	RenderSettings rs;
	const auto res = render(scene, cfg, rs);

	SUBCASE("plane points satisfy the plane equation")
	{
		const auto cloud = export_point_cloud(res.gt, 3);
		REQUIRE(cloud.size() > 1000);
		for (const auto& p : cloud) CHECK(std::abs(p.z() - 900.0) < 1e-9);
	}

	SUBCASE("stride halves the per-axis count")
	{
		const auto c1 = export_point_cloud(res.gt, 1);
		const auto c2 = export_point_cloud(res.gt, 2);
		CHECK(static_cast<double>(c1.size()) / static_cast<double>(c2.size()) ==
		      doctest::Approx(4.0).epsilon(0.1));
	}

	SUBCASE("external frame re-expression")
	{
		const Rigid ext = Rigid::from_euler(0.1, -0.2, 0.3, P3D{100.0, 50.0, -200.0});
		const auto cam = export_point_cloud(res.gt, 5);
		const auto moved = export_point_cloud(res.gt, 5, ext);
		REQUIRE(cam.size() == moved.size());
		for (std::size_t i = 0; i < cam.size(); i += 37)
			CHECK((moved[i] - ext(cam[i])).norm() < 1e-12);
	}
}

TEST_CASE("scene io round trip")
{
	Scene scene = checkerboard_scene(750.0, 9.5, 5, 4);
	SceneObject box;
	box.kind = SceneObject::Kind::box;
	box.pose = Rigid::from_euler(0.1, 0.0, -0.2, P3D{20.0, -10.0, 650.0});
	box.dims = {30.0, 25.0, 40.0};
	box.texture.kind = Texture::Kind::noise;
	box.texture.scale = 3.0;
	box.texture.seed = 5;
	scene.objects.push_back(box);

	const char* path = "scene_roundtrip.txt";
	save_scene(scene, path);
	const Scene back = load_scene(path);
	std::remove(path);

	REQUIRE(back.objects.size() == 2);
	CHECK(back.background_depth == scene.background_depth);
	CHECK(back.objects[0].kind == SceneObject::Kind::checkerboard);
	CHECK(back.objects[0].square == scene.objects[0].square);
	CHECK(back.objects[0].corners_x == 5);
	CHECK(back.objects[1].dims.y() == 25.0);
	CHECK(back.objects[1].texture.seed == 5);
	CHECK(back.objects[1].pose.rotation.isApprox(scene.objects[1].pose.rotation, 1e-12));

	// identical rendering from the reloaded scene
	CameraConfig cfg = testing::desk_config(13, 10, 310, 220);
	RenderSettings rs;
	const auto a = render(scene, cfg, rs);
	const auto b = render(back, cfg, rs);
	for (std::size_t i = 0; i < a.raw.data().size(); i += 11)
		CHECK(a.raw.data()[i] == b.raw.data()[i]);
}
