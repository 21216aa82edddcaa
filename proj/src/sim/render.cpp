#include "blade/sim/render.h"

#include "blade/core/parallel.h"
#include "blade/core/rng.h"
#include "blade/model/projection.h"

#include <cmath>
#include <stdexcept>

namespace blade {

void RenderSettings::check() const
{
	if (rays < 1) throw std::invalid_argument("render settings: rays must be >= 1");
	if (noise_sigma < 0.0) throw std::invalid_argument("render settings: noise must be >= 0");
	if (psf == PsfMode::gaussian and aperture == ApertureMode::full)
		throw std::invalid_argument("render settings: the analytic PSF path applies to pinhole rendering");
}

namespace {

struct Tracer
{
	const Scene* scene;
	const CameraConfig* cfg;
	MiaLayout mia;
	double sensor_z;       ///< camera-frame z of the sensor plane
	double aperture_r;     ///< main lens stop radius [mm]

	// per-lens cached pose
	std::vector<Rigid> lens_poses;

	Tracer(const Scene& s, const CameraConfig& c)
	: scene{&s}, cfg{&c}, mia{c.mia()},
	  sensor_z{-(c.mla.dist_main + c.mla.dist_sensor)},
	  aperture_r{c.main_lens.aperture_radius()}
	{
		lens_poses.reserve(c.mla.cols * c.mla.rows);
		for (std::size_t l = 0; l < c.mla.rows; ++l)
			for (std::size_t k = 0; k < c.mla.cols; ++k)
				lens_poses.push_back(c.lens_pose(k, l));
	}

	const Rigid& pose(std::size_t k, std::size_t l) const { return lens_poses[l * mia.cols + k]; }

	P3D pixel_position(double u, double v) const
	{
		return {(u - cfg->main_lens.u0) * cfg->sensor.pixel_size,
		        (v - cfg->main_lens.v0) * cfg->sensor.pixel_size, sensor_z};
	}

	/// Refract at the main lens (plane z = 0) and trace into the scene.
	std::optional<Scene::Hit> through_main_lens(const P3D& on_lens, const P3D& incoming_dir) const
	{
		const P2D slope_in{incoming_dir.x() / incoming_dir.z(), incoming_dir.y() / incoming_dir.z()};
		const P2D slope_out = slope_in - P2D{on_lens.x(), on_lens.y()} / cfg->main_lens.focal;
		const P3D dir = P3D{slope_out.x(), slope_out.y(), 1.0}.normalized();
		return scene->intersect(on_lens, dir);
	}

	/// Chief ray through the micro-lens center; undeviated at the micro-lens.
	std::optional<Scene::Hit> chief_ray(const P3D& pixel, std::size_t k, std::size_t l) const
	{
		const P3D center = pose(k, l).translation;
		const P3D dir = (center - pixel).normalized();
		const double t = -center.z() / dir.z();
		const P3D on_lens = center + t * dir;
		return through_main_lens(on_lens, dir);
	}

	/// Backward ray from the pixel through micro-lens aperture point q (lens-local
	/// lateral coordinates). Blocked rays return nullopt in full mode.
	std::optional<Scene::Hit> aperture_ray(const P3D& pixel, std::size_t k, std::size_t l,
	                                       const P2D& q_local, bool block) const
	{
		const Rigid& lp = pose(k, l);
		const std::size_t type = cfg->mla.type_of(k, l);
		const double f_i = cfg->types[type].focal;

		// all rays converging to the pixel pass through its conjugate point
		const P3D pixel_mu = lp.inverse()(pixel);
		const P3D conj_mu = thin_lens_object(f_i, pixel_mu);
		const P3D q_cam = lp(P3D{q_local.x(), q_local.y(), 0.0});
		const P3D conj_cam = lp(conj_mu);

		const P3D dir = (q_cam - conj_cam).normalized();
		const double t = -q_cam.z() / dir.z();
		const P3D on_lens = q_cam + t * dir;
		if (block and on_lens.head<2>().norm() > aperture_r) return std::nullopt;
		return through_main_lens(on_lens, dir);
	}
};

/// Unit-disk sample via rejection-free concentric mapping.
P2D disk_sample(double u1, double u2)
{
	const double a = 2.0 * u1 - 1.0;
	const double b = 2.0 * u2 - 1.0;
	if (a == 0.0 and b == 0.0) return {0.0, 0.0};
	double r, phi;
	if (std::abs(a) > std::abs(b))
	{
		r = a;
		phi = (M_PI / 4.0) * (b / a);
	}
	else
	{
		r = b;
		phi = (M_PI / 2.0) - (M_PI / 4.0) * (a / b);
	}
	return {r * std::cos(phi), r * std::sin(phi)};
}

} // namespace

RenderResult render(const Scene& scene, const CameraConfig& cfg, const RenderSettings& settings)
{
	settings.check();
	if (not cfg.distortion.is_null())
		throw std::invalid_argument("render: only zero-distortion configurations are traced");

	const Tracer tracer(scene, cfg);
	const std::size_t w = cfg.sensor.width, h = cfg.sensor.height;

	RenderResult out;
	out.raw = ImageF(w, h);
	out.gt.width = w;
	out.gt.height = h;
	out.gt.cols = cfg.mla.cols;
	out.gt.rows = cfg.mla.rows;
	out.gt.z.assign(w * h, 0.f);
	out.gt.v.assign(w * h, 0.f);
	out.gt.valid.assign(w * h, 0);
	out.gt.points.assign(w * h, P3D::Zero());

	const double lens_r = cfg.mla.diameter() / 2.0;

	parallel_for(0, h, [&](std::size_t y) {
		for (std::size_t x = 0; x < w; ++x)
		{
			const std::size_t idx = y * w + x;
			std::size_t k = 0, l = 0;
			if (not tracer.mia.lens_of_pixel(P2D{static_cast<double>(x), static_cast<double>(y)}, k, l))
				continue;

			const P3D pixel = tracer.pixel_position(static_cast<double>(x), static_cast<double>(y));

			// ground truth from the central chief ray
			if (const auto hit = tracer.chief_ray(pixel, k, l))
			{
				out.gt.z[idx] = static_cast<float>(hit->point.z());
				out.gt.v[idx] = static_cast<float>(obj_to_v(cfg, hit->point.z()));
				out.gt.valid[idx] = 1;
				out.gt.points[idx] = hit->point;
			}

			// radiance integrates over the pixel footprint
			double value = 0.0;
			if (settings.aperture == ApertureMode::pinhole)
			{
				double sum = 0.0;
				int hits = 0;
				for (int sy = -1; sy <= 1; ++sy)
					for (int sx = -1; sx <= 1; ++sx)
					{
						const P3D sub = tracer.pixel_position(static_cast<double>(x) + sx / 3.0,
						                                      static_cast<double>(y) + sy / 3.0);
						if (const auto hit = tracer.chief_ray(sub, k, l))
						{
							sum += hit->radiance;
							++hits;
						}
					}
				if (hits > 0) value = sum / static_cast<double>(hits);
			}
			else
			{
				CounterRng rng(settings.seed, idx);
				double sum = 0.0;
				int passed = 0;
				for (int s = 0; s < settings.rays; ++s)
				{
					const P2D q = lens_r * disk_sample(rng.next_double(), rng.next_double());
					const P3D sub = tracer.pixel_position(static_cast<double>(x) + rng.next_double() - 0.5,
					                                      static_cast<double>(y) + rng.next_double() - 0.5);
					if (const auto hit = tracer.aperture_ray(sub, k, l, q, /*block=*/true))
					{
						sum += hit->radiance;
						++passed;
					}
				}
				if (passed > 0) value = sum / static_cast<double>(passed);
			}

			// with the analytic PSF path, noise goes on top of the blurred image instead
			if (settings.noise_sigma > 0.0 and settings.psf != PsfMode::gaussian)
			{
				CounterRng noise(settings.seed ^ 0x5bd1e995u, idx);
				value += settings.noise_sigma * noise.next_normal();
			}
			out.raw(x, y) = static_cast<float>(std::max(0.0, value));
		}
	});

	// per-micro-image ground truth at the centers
	out.gt.v_coarse.assign(cfg.mla.cols * cfg.mla.rows, 0.f);
	out.gt.z_coarse.assign(cfg.mla.cols * cfg.mla.rows, 0.f);
	out.gt.valid_coarse.assign(cfg.mla.cols * cfg.mla.rows, 0);
	for (std::size_t l = 0; l < cfg.mla.rows; ++l)
	{
		for (std::size_t k = 0; k < cfg.mla.cols; ++k)
		{
			const P2D c = tracer.mia.center(k, l);
			const P3D pixel = tracer.pixel_position(c.x(), c.y());
			if (const auto hit = tracer.chief_ray(pixel, k, l))
			{
				const std::size_t i = l * cfg.mla.cols + k;
				out.gt.z_coarse[i] = static_cast<float>(hit->point.z());
				out.gt.v_coarse[i] = static_cast<float>(obj_to_v(cfg, hit->point.z()));
				out.gt.valid_coarse[i] = 1;
			}
		}
	}

	// analytic defocus: per micro-image Gaussian blur at the model-implied spread
	if (settings.psf == PsfMode::gaussian)
	{
		ImageF blurred = out.raw;
		parallel_for(0, cfg.mla.rows, [&](std::size_t l) {
			for (std::size_t k = 0; k < cfg.mla.cols; ++k)
			{
				const std::size_t mi = l * cfg.mla.cols + k;
				if (not out.gt.valid_coarse[mi]) continue;
				const std::size_t type = cfg.mla.type_of(k, l);
				const double rho = virtual_depth_to_blur(cfg, out.gt.v_coarse[mi], type);
				const double sigma = cfg.blur.kappa * std::abs(rho);
				if (sigma < 1e-6) continue;

				// extended patch through this lens so the blur support has real content
				const P2D c = tracer.mia.center(k, l);
				const long pad = static_cast<long>(std::ceil(3.0 * sigma)) + 1;
				const long r = static_cast<long>(std::ceil(tracer.mia.radius)) + pad;
				const long cx = std::lround(c.x()), cy = std::lround(c.y());
				const std::size_t pw = 2 * r + 1;
				ImageF patch(pw, pw);
				for (long py = -r; py <= r; ++py)
					for (long px = -r; px <= r; ++px)
					{
						double acc = 0.0;
						int hits = 0;
						for (int sy = -1; sy <= 1; ++sy)
							for (int sx = -1; sx <= 1; ++sx)
							{
								const P3D pixel = tracer.pixel_position(
									static_cast<double>(cx + px) + sx / 3.0,
									static_cast<double>(cy + py) + sy / 3.0);
								if (const auto hit = tracer.chief_ray(pixel, k, l))
								{
									acc += hit->radiance;
									++hits;
								}
							}
						if (hits > 0) patch(px + r, py + r) = static_cast<float>(acc / hits);
					}
				const ImageF soft = gaussian_blur(patch, sigma);

				const double rr = tracer.mia.radius * tracer.mia.radius;
				for (long py = -r; py <= r; ++py)
					for (long px = -r; px <= r; ++px)
					{
						const long gx = cx + px, gy = cy + py;
						if (gx < 0 or gy < 0 or gx >= static_cast<long>(w) or gy >= static_cast<long>(h))
							continue;
						const P2D p{static_cast<double>(gx), static_cast<double>(gy)};
						if ((p - c).squaredNorm() > rr) continue;
						std::size_t pk = 0, pl = 0;
						if (not tracer.mia.lens_of_pixel(p, pk, pl) or pk != k or pl != l) continue;
						blurred(gx, gy) = soft(px + r, py + r);
					}
			}
		});
		out.raw = std::move(blurred);

		if (settings.noise_sigma > 0.0)
		{
			parallel_for(0, h, [&](std::size_t y) {
				for (std::size_t x = 0; x < w; ++x)
				{
					const std::size_t idx = y * w + x;
					CounterRng noise(settings.seed ^ 0x2545f491u, idx);
					out.raw(x, y) = static_cast<float>(std::max(
						0.0, static_cast<double>(out.raw(x, y)) +
						     settings.noise_sigma * noise.next_normal()));
				}
			});
		}
	}

	return out;
}

} // namespace blade
