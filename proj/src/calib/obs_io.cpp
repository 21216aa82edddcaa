#include "blade/calib/obs_io.h"

#include "blade/io/text_doc.h"

#include <sstream>
#include <stdexcept>

namespace blade {

namespace {

BapFeature parse_obs(const std::string& line)
{
	std::istringstream in(line);
	BapFeature f;
	long k, l, type;
	if (not (in >> f.u >> f.v >> f.rho >> k >> l >> type) or type < 1)
		throw std::runtime_error("malformed obs entry: " + line);
	f.k = static_cast<std::size_t>(k);
	f.l = static_cast<std::size_t>(l);
	f.type = static_cast<std::size_t>(type - 1);
	return f;
}

std::string format_obs(const BapFeature& f)
{
	std::ostringstream out;
	out << TextDoc::format_double(f.u) << " " << TextDoc::format_double(f.v) << " "
	    << TextDoc::format_double(f.rho) << " " << f.k << " " << f.l << " " << (f.type + 1);
	return out.str();
}

P3D parse_point(const std::string& line)
{
	std::istringstream in(line);
	P3D p;
	if (not (in >> p.x() >> p.y() >> p.z()))
		throw std::runtime_error("malformed point entry: " + line);
	return p;
}

} // namespace

std::vector<ScaleObservation> load_observations(const std::string& path)
{
	const TextDoc doc = TextDoc::load(path);
	std::vector<ScaleObservation> frames;

	for (std::size_t n = 0;; ++n)
	{
		const std::string base = "frame." + std::to_string(n);
		if (not doc.has(base)) break;
		const auto& head = doc.section(base);

		ScaleObservation obs;
		{
			std::istringstream in(head.get("grid"));
			if (not (in >> obs.grid_cols >> obs.grid_rows >> obs.grid_spacing))
				throw std::runtime_error(path + ": malformed grid line in [" + base + "]");
		}
		obs.nominal_z = head.get_double_or("z", 0.0);
		obs.clusters.resize(obs.corner_count());
		for (std::size_t c = 0; c < obs.corner_count(); ++c)
		{
			const std::string cname = base + ".cluster." + std::to_string(c);
			if (not doc.has(cname))
				throw std::runtime_error(path + ": missing [" + cname + "]");
			for (const auto& line : doc.section(cname).get_all("obs"))
				obs.clusters[c].push_back(parse_obs(line));
		}
		frames.push_back(std::move(obs));
	}
	if (frames.empty()) throw std::runtime_error(path + ": no frames found");
	return frames;
}

void save_observations(const std::vector<ScaleObservation>& observations, const std::string& path)
{
	TextDoc doc;
	for (std::size_t n = 0; n < observations.size(); ++n)
	{
		const auto& obs = observations[n];
		const std::string base = "frame." + std::to_string(n);
		{
			std::ostringstream grid;
			grid << obs.grid_cols << " " << obs.grid_rows << " "
			     << TextDoc::format_double(obs.grid_spacing);
			doc.set(base, "grid", grid.str());
		}
		if (obs.nominal_z != 0.0) doc.set_double(base, "z", obs.nominal_z);
		for (std::size_t c = 0; c < obs.clusters.size(); ++c)
		{
			auto& sec = doc.add(base + ".cluster." + std::to_string(c));
			for (const auto& f : obs.clusters[c])
				sec.entries.emplace_back("obs", format_obs(f));
		}
	}
	doc.save(path);
}

PointConstellation load_constellation(const std::string& path)
{
	const TextDoc doc = TextDoc::load(path);
	PointConstellation con;
	for (std::size_t n = 0;; ++n)
	{
		const std::string base = "target." + std::to_string(n);
		if (not doc.has(base)) break;
		const auto& sec = doc.section(base);
		con.points.push_back(parse_point(sec.get("point")));
		con.clusters.emplace_back();
		for (const auto& line : sec.get_all("obs"))
			con.clusters.back().push_back(parse_obs(line));
	}
	if (con.points.empty()) throw std::runtime_error(path + ": no targets found");
	return con;
}

void save_constellation(const PointConstellation& constellation, const std::string& path)
{
	TextDoc doc;
	for (std::size_t n = 0; n < constellation.points.size(); ++n)
	{
		auto& sec = doc.add("target." + std::to_string(n));
		const P3D& p = constellation.points[n];
		std::ostringstream pt;
		pt << TextDoc::format_double(p.x()) << " " << TextDoc::format_double(p.y()) << " "
		   << TextDoc::format_double(p.z());
		sec.entries.emplace_back("point", pt.str());
		for (const auto& f : constellation.clusters[n])
			sec.entries.emplace_back("obs", format_obs(f));
	}
	doc.save(path);
}

} // namespace blade
