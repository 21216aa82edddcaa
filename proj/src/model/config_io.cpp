#include "blade/model/config_io.h"

#include "blade/io/text_doc.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blade {

namespace {

ScaleKind parse_scale_kind(const std::string& s)
{
	if (s == "identity") return ScaleKind::identity;
	if (s == "linear") return ScaleKind::linear;
	if (s == "quadratic") return ScaleKind::quadratic;
	throw std::runtime_error("unknown scale kind: " + s);
}

const char* scale_kind_name(ScaleKind k)
{
	switch (k)
	{
		case ScaleKind::identity: return "identity";
		case ScaleKind::linear: return "linear";
		default: return "quadratic";
	}
}

} // namespace

CameraConfig parse_camera_config(const std::string& text)
{
	const TextDoc doc = TextDoc::parse(text);
	CameraConfig cfg;

	const auto& ml = doc.section("main_lens");
	cfg.main_lens.focal = ml.get_double("focal");
	cfg.main_lens.u0 = ml.get_double("u0");
	cfg.main_lens.v0 = ml.get_double("v0");
	cfg.main_lens.aperture = ml.get_double_or("aperture", 2.4);

	if (doc.has("distortion"))
	{
		const auto& d = doc.section("distortion");
		cfg.distortion = {d.get_double_or("q1", 0.0), d.get_double_or("q2", 0.0),
		                  d.get_double_or("q3", 0.0), d.get_double_or("p1", 0.0),
		                  d.get_double_or("p2", 0.0)};
	}
	if (doc.has("inverse_distortion"))
	{
		const auto& d = doc.section("inverse_distortion");
		cfg.inv_distortion = {d.get_double_or("qn1", 0.0), d.get_double_or("qn2", 0.0),
		                      d.get_double_or("qn3", 0.0), d.get_double_or("pn1", 0.0),
		                      d.get_double_or("pn2", 0.0)};
	}

	const auto& mla = doc.section("mla");
	cfg.mla.cols = static_cast<std::size_t>(mla.get_long("cols"));
	cfg.mla.rows = static_cast<std::size_t>(mla.get_long("rows"));
	cfg.mla.pitch = mla.get_double("pitch");
	cfg.mla.dist_main = mla.get_double("dist_main");
	cfg.mla.dist_sensor = mla.get_double("dist_sensor");
	cfg.mla.tx = mla.get_double_or("tx", 0.0);
	cfg.mla.ty = mla.get_double_or("ty", 0.0);
	cfg.mla.theta_x = mla.get_double_or("theta_x", 0.0);
	cfg.mla.theta_y = mla.get_double_or("theta_y", 0.0);
	cfg.mla.theta_z = mla.get_double_or("theta_z", 0.0);
	cfg.mla.type_count = static_cast<std::size_t>(mla.get_long_or("types", 1));
	cfg.mla.type_phase = static_cast<int>(mla.get_long_or("type_phase", 0));
	cfg.mla.lens_diameter = mla.get_double_or("lens_diameter", 0.0);

	cfg.types.resize(cfg.mla.type_count);
	for (std::size_t i = 0; i < cfg.mla.type_count; ++i)
	{
		const auto& t = doc.section("type." + std::to_string(i + 1));
		cfg.types[i].focal = t.get_double("focal");
	}

	const auto& sen = doc.section("sensor");
	cfg.sensor.width = static_cast<std::size_t>(sen.get_long("width"));
	cfg.sensor.height = static_cast<std::size_t>(sen.get_long("height"));
	cfg.sensor.pixel_size = sen.get_double("pixel_size");

	if (doc.has("blur"))
		cfg.blur.kappa = doc.section("blur").get_double_or("kappa", 1.0);

	if (doc.has("scale"))
	{
		const auto& sc = doc.section("scale");
		cfg.scale.kind = parse_scale_kind(sc.get_or("kind", "identity"));
		cfg.scale.gamma0 = sc.get_double_or("gamma0", 0.0);
		cfg.scale.gamma1 = sc.get_double_or("gamma1", 1.0);
		cfg.scale.gamma2 = sc.get_double_or("gamma2", 0.0);
	}

	if (doc.has("pose"))
	{
		const auto& po = doc.section("pose");
		cfg.world_pose = Rigid::from_euler(
			po.get_double_or("rx", 0.0), po.get_double_or("ry", 0.0), po.get_double_or("rz", 0.0),
			P3D{po.get_double_or("tx", 0.0), po.get_double_or("ty", 0.0), po.get_double_or("tz", 0.0)});
	}

	cfg.update_derived();

	// stored derived coefficients, when present, must agree with the recomputed ones
	if (doc.has("derived"))
	{
		const auto& de = doc.section("derived");
		auto check = [&](const char* key, double recomputed) {
			if (de.has(key) and not nearly_equal(de.get_double(key), recomputed, 1e-9, 1e-12))
				throw std::runtime_error(std::string("stored derived coefficient '") + key +
				                         "' inconsistent with primaries");
		};
		check("m", cfg.m);
		check("lambda", cfg.lambda);
		for (std::size_t i = 0; i < cfg.types.size(); ++i)
		{
			check(("q" + std::to_string(i + 1)).c_str(), cfg.types[i].q);
			check(("a0_" + std::to_string(i + 1)).c_str(), cfg.types[i].a0);
		}
	}

	cfg.validate();
	return cfg;
}

CameraConfig load_camera_config(const std::string& path)
{
	std::ifstream f(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot open camera config " + path);
	std::ostringstream buf;
	buf << f.rdbuf();
	return parse_camera_config(buf.str());
}

std::string serialize_camera_config(const CameraConfig& cfg)
{
	TextDoc doc;
	doc.set_double("main_lens", "focal", cfg.main_lens.focal);
	doc.set_double("main_lens", "u0", cfg.main_lens.u0);
	doc.set_double("main_lens", "v0", cfg.main_lens.v0);
	doc.set_double("main_lens", "aperture", cfg.main_lens.aperture);

	doc.set_double("distortion", "q1", cfg.distortion.q1);
	doc.set_double("distortion", "q2", cfg.distortion.q2);
	doc.set_double("distortion", "q3", cfg.distortion.q3);
	doc.set_double("distortion", "p1", cfg.distortion.p1);
	doc.set_double("distortion", "p2", cfg.distortion.p2);

	doc.set_double("inverse_distortion", "qn1", cfg.inv_distortion.q1);
	doc.set_double("inverse_distortion", "qn2", cfg.inv_distortion.q2);
	doc.set_double("inverse_distortion", "qn3", cfg.inv_distortion.q3);
	doc.set_double("inverse_distortion", "pn1", cfg.inv_distortion.p1);
	doc.set_double("inverse_distortion", "pn2", cfg.inv_distortion.p2);

	doc.set_long("mla", "cols", static_cast<long>(cfg.mla.cols));
	doc.set_long("mla", "rows", static_cast<long>(cfg.mla.rows));
	doc.set_double("mla", "pitch", cfg.mla.pitch);
	doc.set_double("mla", "dist_main", cfg.mla.dist_main);
	doc.set_double("mla", "dist_sensor", cfg.mla.dist_sensor);
	doc.set_double("mla", "tx", cfg.mla.tx);
	doc.set_double("mla", "ty", cfg.mla.ty);
	doc.set_double("mla", "theta_x", cfg.mla.theta_x);
	doc.set_double("mla", "theta_y", cfg.mla.theta_y);
	doc.set_double("mla", "theta_z", cfg.mla.theta_z);
	doc.set_long("mla", "types", static_cast<long>(cfg.mla.type_count));
	doc.set_long("mla", "type_phase", cfg.mla.type_phase);
	if (cfg.mla.lens_diameter > 0.0)
		doc.set_double("mla", "lens_diameter", cfg.mla.lens_diameter);

	for (std::size_t i = 0; i < cfg.types.size(); ++i)
		doc.set_double("type." + std::to_string(i + 1), "focal", cfg.types[i].focal);

	doc.set_long("sensor", "width", static_cast<long>(cfg.sensor.width));
	doc.set_long("sensor", "height", static_cast<long>(cfg.sensor.height));
	doc.set_double("sensor", "pixel_size", cfg.sensor.pixel_size);

	doc.set_double("blur", "kappa", cfg.blur.kappa);

	doc.set("scale", "kind", scale_kind_name(cfg.scale.kind));
	doc.set_double("scale", "gamma0", cfg.scale.gamma0);
	doc.set_double("scale", "gamma1", cfg.scale.gamma1);
	doc.set_double("scale", "gamma2", cfg.scale.gamma2);

	doc.set_double("derived", "m", cfg.m);
	doc.set_double("derived", "lambda", cfg.lambda);
	for (std::size_t i = 0; i < cfg.types.size(); ++i)
	{
		doc.set_double("derived", "q" + std::to_string(i + 1), cfg.types[i].q);
		doc.set_double("derived", "a0_" + std::to_string(i + 1), cfg.types[i].a0);
	}
	return doc.serialize();
}

void save_camera_config(const CameraConfig& cfg, const std::string& path)
{
	std::ofstream f(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot write camera config " + path);
	f << serialize_camera_config(cfg);
}

} // namespace blade
