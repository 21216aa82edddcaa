#pragma once

#include <map>
#include <string>
#include <vector>

namespace blade {

/// Minimal structured text document: `[section.name]` headers followed by
/// `key = value` lines; '#' starts a comment; a key may repeat inside a section.
class TextDoc
{
public:
	struct Section
	{
		std::string name;
		std::vector<std::pair<std::string, std::string>> entries;

		bool has(const std::string& key) const;
		const std::string& get(const std::string& key) const; // throws when missing
		std::string get_or(const std::string& key, const std::string& fallback) const;
		double get_double(const std::string& key) const;
		double get_double_or(const std::string& key, double fallback) const;
		long get_long(const std::string& key) const;
		long get_long_or(const std::string& key, long fallback) const;
		std::vector<std::string> get_all(const std::string& key) const;
	};

	static TextDoc parse(const std::string& text);
	static TextDoc load(const std::string& path); // throws std::runtime_error on I/O failure

	bool has(const std::string& name) const;
	const Section& section(const std::string& name) const; // throws when missing
	const std::vector<Section>& sections() const { return sections_; }

	/// Sections whose name starts with the given prefix, in file order.
	std::vector<const Section*> sections_with_prefix(const std::string& prefix) const;

	Section& add(const std::string& name);
	void set(const std::string& section, const std::string& key, const std::string& value);
	void set_double(const std::string& section, const std::string& key, double value);
	void set_long(const std::string& section, const std::string& key, long value);

	std::string serialize() const;
	void save(const std::string& path) const;

	/// Full round-trip precision for doubles.
	static std::string format_double(double v);

private:
	std::vector<Section> sections_;
	std::map<std::string, std::size_t> index_;
};

} // namespace blade
