#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace blade {

/// Run record emitted next to every CLI output set; re-running the same command on
/// the same inputs reproduces the outputs bit-exactly.
struct RunManifest
{
	std::string subcommand;
	std::vector<std::pair<std::string, std::string>> settings;
	std::vector<std::string> inputs;
	std::vector<std::string> outputs;
	std::uint64_t config_hash = 0;
	std::uint64_t seed = 0;
	double wall_seconds = 0.0;

	void add(const std::string& key, const std::string& value) { settings.emplace_back(key, value); }
	void save(const std::string& path) const;
};

/// FNV-1a over the file bytes; throws std::runtime_error when unreadable.
std::uint64_t hash_file(const std::string& path);

} // namespace blade
