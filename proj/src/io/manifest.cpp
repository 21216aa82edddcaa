#include "blade/io/manifest.h"

#include "blade/io/text_doc.h"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace blade {

std::uint64_t hash_file(const std::string& path)
{
	std::ifstream f(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot hash " + path);
	std::uint64_t h = 1469598103934665603ull;
	char buf[4096];
	while (f.read(buf, sizeof(buf)) or f.gcount() > 0)
	{
		for (std::streamsize i = 0; i < f.gcount(); ++i)
		{
			h ^= static_cast<unsigned char>(buf[i]);
			h *= 1099511628211ull;
		}
		if (not f) break;
	}
	return h;
}

void RunManifest::save(const std::string& path) const
{
	TextDoc doc;
	doc.set("run", "subcommand", subcommand);
	{
		char buf[20];
		std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash));
		doc.set("run", "config_hash", buf);
	}
	doc.set("run", "seed", std::to_string(seed));
	doc.set_double("run", "wall_seconds", wall_seconds);
	for (const auto& [k, v] : settings) doc.set("settings", k, v);
	{
		auto& sec = doc.add("inputs");
		for (const auto& in : inputs) sec.entries.emplace_back("path", in);
	}
	{
		auto& sec = doc.add("outputs");
		for (const auto& out : outputs) sec.entries.emplace_back("path", out);
	}
	doc.save(path);
}

} // namespace blade
