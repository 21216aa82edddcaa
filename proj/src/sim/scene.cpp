#include "blade/sim/scene.h"

#include "blade/core/rng.h"
#include "blade/io/text_doc.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blade {

namespace {

double hash01(std::uint64_t seed, long ix, long iy)
{
	CounterRng rng(seed, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) ^
	                         static_cast<std::uint32_t>(iy));
	return rng.next_double();
}

double smooth(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); } // quintic

double value_noise(std::uint64_t seed, double x, double y)
{
	const double fx = std::floor(x), fy = std::floor(y);
	const long ix = static_cast<long>(fx), iy = static_cast<long>(fy);
	const double tx = smooth(x - fx), ty = smooth(y - fy);
	const double a = hash01(seed, ix, iy), b = hash01(seed, ix + 1, iy);
	const double c = hash01(seed, ix, iy + 1), d = hash01(seed, ix + 1, iy + 1);
	return (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
}

} // namespace

double Texture::at(double u, double v) const
{
	switch (kind)
	{
		case Kind::uniform:
			return value;
		case Kind::checker:
		{
			const long cu = static_cast<long>(std::floor(u / scale));
			const long cv = static_cast<long>(std::floor(v / scale));
			return ((cu + cv) & 1) ? 0.9 : 0.1;
		}
		case Kind::noise:
		{
			// three octaves of smooth value noise
			double acc = 0.0, amp = 0.55, freq = 1.0 / scale;
			for (int o = 0; o < 3; ++o)
			{
				acc += amp * value_noise(seed + o, u * freq, v * freq);
				amp *= 0.5;
				freq *= 2.1;
			}
			return std::clamp(0.05 + 0.9 * acc, 0.0, 1.0);
		}
		case Kind::gradient:
			return 0.5 + 0.25 * std::sin(2.0 * M_PI * u / scale) +
			       0.25 * std::sin(2.0 * M_PI * v / scale);
	}
	return value;
}

std::vector<P3D> SceneObject::corner_points() const
{
	std::vector<P3D> out;
	if (kind != Kind::checkerboard) return out;
	const double x0 = -0.5 * square * static_cast<double>(corners_x - 1);
	const double y0 = -0.5 * square * static_cast<double>(corners_y - 1);
	for (std::size_t cy = 0; cy < corners_y; ++cy)
		for (std::size_t cx = 0; cx < corners_x; ++cx)
			out.push_back(pose(P3D{x0 + square * static_cast<double>(cx),
			                       y0 + square * static_cast<double>(cy), 0.0}));
	return out;
}

std::optional<Scene::Hit> Scene::intersect(const P3D& origin, const P3D& dir) const
{
	constexpr double eps = 1e-9;
	std::optional<Hit> best;

	auto consider = [&](double t, const P3D& point, double radiance) {
		if (t <= eps) return;
		if (not best or t < best->t) best = Hit{t, point, radiance};
	};

	for (const auto& obj : objects)
	{
		const Rigid inv = obj.pose.inverse();
		const P3D o = inv(origin);
		const P3D d = inv.rotation * dir;

		if (obj.kind == SceneObject::Kind::plane or obj.kind == SceneObject::Kind::checkerboard)
		{
			if (std::abs(d.z()) < 1e-15) continue;
			const double t = -o.z() / d.z();
			if (t <= eps) continue;
			const P3D local = o + t * d;
			double hx, hy;
			if (obj.kind == SceneObject::Kind::plane)
			{
				hx = obj.size_x / 2.0;
				hy = obj.size_y / 2.0;
			}
			else
			{
				// board extends one square beyond the interior corner grid
				hx = obj.square * (static_cast<double>(obj.corners_x) + 1.0) / 2.0;
				hy = obj.square * (static_cast<double>(obj.corners_y) + 1.0) / 2.0;
			}
			if (std::abs(local.x()) > hx or std::abs(local.y()) > hy) continue;

			double radiance;
			if (obj.kind == SceneObject::Kind::checkerboard)
			{
				// square boundaries run through the interior corners
				const double x0 = -0.5 * obj.square * static_cast<double>(obj.corners_x - 1);
				const double y0 = -0.5 * obj.square * static_cast<double>(obj.corners_y - 1);
				const long cu = static_cast<long>(std::floor((local.x() - x0) / obj.square));
				const long cv = static_cast<long>(std::floor((local.y() - y0) / obj.square));
				radiance = ((cu + cv) & 1) ? 0.9 : 0.1;
			}
			else
			{
				radiance = obj.texture.at(local.x(), local.y());
			}
			consider(t, origin + t * dir, radiance);
		}
		else // box
		{
			const P3D h = obj.dims / 2.0;
			double t_lo = -1e300, t_hi = 1e300;
			int axis_lo = -1;
			for (int a = 0; a < 3; ++a)
			{
				if (std::abs(d[a]) < 1e-15)
				{
					if (std::abs(o[a]) > h[a]) { t_lo = 1e300; break; }
					continue;
				}
				double t1 = (-h[a] - o[a]) / d[a];
				double t2 = (h[a] - o[a]) / d[a];
				if (t1 > t2) std::swap(t1, t2);
				if (t1 > t_lo) { t_lo = t1; axis_lo = a; }
				t_hi = std::min(t_hi, t2);
			}
			if (t_lo > t_hi or t_lo <= eps) continue;
			const P3D local = o + t_lo * d;
			const int a = axis_lo < 0 ? 2 : axis_lo;
			const double u = local[(a + 1) % 3];
			const double v = local[(a + 2) % 3];
			consider(t_lo, origin + t_lo * dir, obj.texture.at(u, v));
		}
	}

	// fronto-planar backdrop
	if (std::abs(dir.z()) > 1e-15)
	{
		const double t = (background_depth - origin.z()) / dir.z();
		if (t > eps)
		{
			const P3D p = origin + t * dir;
			consider(t, p, background.at(p.x(), p.y()));
		}
	}
	return best;
}

const SceneObject* Scene::checkerboard() const
{
	for (const auto& obj : objects)
		if (obj.kind == SceneObject::Kind::checkerboard) return &obj;
	return nullptr;
}

namespace {

Texture parse_texture(const std::string& spec)
{
	std::istringstream in(spec);
	std::string kind;
	in >> kind;
	Texture t;
	if (kind == "uniform")
	{
		t.kind = Texture::Kind::uniform;
		in >> t.value;
	}
	else if (kind == "checker")
	{
		t.kind = Texture::Kind::checker;
		in >> t.scale;
	}
	else if (kind == "noise")
	{
		t.kind = Texture::Kind::noise;
		in >> t.scale >> t.seed;
	}
	else if (kind == "gradient")
	{
		t.kind = Texture::Kind::gradient;
		in >> t.scale;
	}
	else
	{
		throw std::runtime_error("unknown texture kind: " + kind);
	}
	return t;
}

std::string format_texture(const Texture& t)
{
	std::ostringstream out;
	switch (t.kind)
	{
		case Texture::Kind::uniform: out << "uniform " << TextDoc::format_double(t.value); break;
		case Texture::Kind::checker: out << "checker " << TextDoc::format_double(t.scale); break;
		case Texture::Kind::noise:
			out << "noise " << TextDoc::format_double(t.scale) << " " << t.seed;
			break;
		case Texture::Kind::gradient: out << "gradient " << TextDoc::format_double(t.scale); break;
	}
	return out.str();
}

P3D parse_vec3(const std::string& s)
{
	std::istringstream in(s);
	P3D v;
	if (not (in >> v.x() >> v.y() >> v.z())) throw std::runtime_error("malformed vector: " + s);
	return v;
}

} // namespace

Scene parse_scene(const std::string& text)
{
	const TextDoc doc = TextDoc::parse(text);
	Scene scene;
	if (doc.has("scene"))
	{
		const auto& head = doc.section("scene");
		scene.background_depth = head.get_double_or("background", 3000.0);
		if (head.has("background_texture"))
			scene.background = parse_texture(head.get("background_texture"));
	}

	for (std::size_t n = 0;; ++n)
	{
		const std::string name = "object." + std::to_string(n);
		if (not doc.has(name)) break;
		const auto& sec = doc.section(name);
		SceneObject obj;
		const std::string kind = sec.get("kind");
		if (kind == "plane") obj.kind = SceneObject::Kind::plane;
		else if (kind == "checkerboard") obj.kind = SceneObject::Kind::checkerboard;
		else if (kind == "box") obj.kind = SceneObject::Kind::box;
		else throw std::runtime_error("unknown object kind: " + kind);

		const P3D center = parse_vec3(sec.get("center"));
		P3D rot = P3D::Zero();
		if (sec.has("rotation")) rot = parse_vec3(sec.get("rotation"));
		obj.pose = Rigid::from_euler(rot.x(), rot.y(), rot.z(), center);

		if (obj.kind == SceneObject::Kind::plane)
		{
			std::istringstream in(sec.get("size"));
			if (not (in >> obj.size_x >> obj.size_y))
				throw std::runtime_error("malformed plane size");
		}
		if (obj.kind == SceneObject::Kind::checkerboard)
		{
			std::istringstream in(sec.get("corners"));
			if (not (in >> obj.corners_x >> obj.corners_y))
				throw std::runtime_error("malformed corner grid");
			obj.square = sec.get_double("square");
		}
		if (obj.kind == SceneObject::Kind::box)
			obj.dims = parse_vec3(sec.get("dims"));
		if (sec.has("texture")) obj.texture = parse_texture(sec.get("texture"));
		scene.objects.push_back(obj);
	}
	return scene;
}

Scene load_scene(const std::string& path)
{
	std::ifstream f(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot open scene " + path);
	std::ostringstream buf;
	buf << f.rdbuf();
	return parse_scene(buf.str());
}

void save_scene(const Scene& scene, const std::string& path)
{
	TextDoc doc;
	doc.set_double("scene", "background", scene.background_depth);
	doc.set("scene", "background_texture", format_texture(scene.background));
	for (std::size_t n = 0; n < scene.objects.size(); ++n)
	{
		const auto& obj = scene.objects[n];
		const std::string name = "object." + std::to_string(n);
		const char* kind = obj.kind == SceneObject::Kind::plane ? "plane"
		                  : obj.kind == SceneObject::Kind::checkerboard ? "checkerboard" : "box";
		doc.set(name, "kind", kind);
		{
			std::ostringstream c;
			const P3D& t = obj.pose.translation;
			c << TextDoc::format_double(t.x()) << " " << TextDoc::format_double(t.y()) << " "
			  << TextDoc::format_double(t.z());
			doc.set(name, "center", c.str());
		}
		if (not obj.pose.rotation.isApprox(Mat3::Identity(), 1e-15))
		{
			const P3D zyx = obj.pose.rotation.eulerAngles(2, 1, 0); // matches from_euler order
			std::ostringstream r;
			r << TextDoc::format_double(zyx[2]) << " " << TextDoc::format_double(zyx[1]) << " "
			  << TextDoc::format_double(zyx[0]);
			doc.set(name, "rotation", r.str());
		}
		if (obj.kind == SceneObject::Kind::plane)
		{
			std::ostringstream s;
			s << TextDoc::format_double(obj.size_x) << " " << TextDoc::format_double(obj.size_y);
			doc.set(name, "size", s.str());
		}
		if (obj.kind == SceneObject::Kind::checkerboard)
		{
			std::ostringstream c;
			c << obj.corners_x << " " << obj.corners_y;
			doc.set(name, "corners", c.str());
			doc.set_double(name, "square", obj.square);
		}
		if (obj.kind == SceneObject::Kind::box)
		{
			std::ostringstream d;
			d << TextDoc::format_double(obj.dims.x()) << " " << TextDoc::format_double(obj.dims.y())
			  << " " << TextDoc::format_double(obj.dims.z());
			doc.set(name, "dims", d.str());
		}
		doc.set(name, "texture", format_texture(obj.texture));
	}
	doc.save(path);
}

} // namespace blade
