#include "blade/io/text_doc.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blade {

namespace {

std::string trim(const std::string& s)
{
	const auto b = s.find_first_not_of(" \t\r\n");
	if (b == std::string::npos) return {};
	const auto e = s.find_last_not_of(" \t\r\n");
	return s.substr(b, e - b + 1);
}

} // namespace

bool TextDoc::Section::has(const std::string& key) const
{
	for (const auto& [k, v] : entries)
		if (k == key) return true;
	return false;
}

const std::string& TextDoc::Section::get(const std::string& key) const
{
	for (const auto& [k, v] : entries)
		if (k == key) return v;
	throw std::runtime_error("missing key '" + key + "' in section [" + name + "]");
}

std::string TextDoc::Section::get_or(const std::string& key, const std::string& fallback) const
{
	for (const auto& [k, v] : entries)
		if (k == key) return v;
	return fallback;
}

double TextDoc::Section::get_double(const std::string& key) const
{
	const std::string& s = get(key);
	try { return std::stod(s); }
	catch (...) { throw std::runtime_error("key '" + key + "' in [" + name + "] is not a number: " + s); }
}

double TextDoc::Section::get_double_or(const std::string& key, double fallback) const
{
	return has(key) ? get_double(key) : fallback;
}

long TextDoc::Section::get_long(const std::string& key) const
{
	const std::string& s = get(key);
	try { return std::stol(s); }
	catch (...) { throw std::runtime_error("key '" + key + "' in [" + name + "] is not an integer: " + s); }
}

long TextDoc::Section::get_long_or(const std::string& key, long fallback) const
{
	return has(key) ? get_long(key) : fallback;
}

std::vector<std::string> TextDoc::Section::get_all(const std::string& key) const
{
	std::vector<std::string> out;
	for (const auto& [k, v] : entries)
		if (k == key) out.push_back(v);
	return out;
}

TextDoc TextDoc::parse(const std::string& text)
{
	TextDoc doc;
	Section* current = nullptr;
	std::istringstream in(text);
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line))
	{
		++line_no;
		const auto hash = line.find('#');
		if (hash != std::string::npos) line = line.substr(0, hash);
		line = trim(line);
		if (line.empty()) continue;

		if (line.front() == '[')
		{
			if (line.back() != ']')
				throw std::runtime_error("line " + std::to_string(line_no) + ": unterminated section header");
			current = &doc.add(trim(line.substr(1, line.size() - 2)));
			continue;
		}

		const auto eq = line.find('=');
		if (eq == std::string::npos)
			throw std::runtime_error("line " + std::to_string(line_no) + ": expected key = value");
		if (current == nullptr)
			current = &doc.add("");
		current->entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
	}
	return doc;
}

TextDoc TextDoc::load(const std::string& path)
{
	std::ifstream f(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot open " + path);
	std::ostringstream buf;
	buf << f.rdbuf();
	return parse(buf.str());
}

bool TextDoc::has(const std::string& name) const { return index_.count(name) > 0; }

const TextDoc::Section& TextDoc::section(const std::string& name) const
{
	const auto it = index_.find(name);
	if (it == index_.end()) throw std::runtime_error("missing section [" + name + "]");
	return sections_[it->second];
}

std::vector<const TextDoc::Section*> TextDoc::sections_with_prefix(const std::string& prefix) const
{
	std::vector<const Section*> out;
	for (const auto& s : sections_)
		if (s.name.rfind(prefix, 0) == 0) out.push_back(&s);
	return out;
}

TextDoc::Section& TextDoc::add(const std::string& name)
{
	const auto it = index_.find(name);
	if (it != index_.end()) return sections_[it->second];
	index_[name] = sections_.size();
	sections_.push_back(Section{name, {}});
	return sections_.back();
}

void TextDoc::set(const std::string& section, const std::string& key, const std::string& value)
{
	auto& s = add(section);
	for (auto& [k, v] : s.entries)
	{
		if (k == key)
		{
			v = value;
			return;
		}
	}
	s.entries.emplace_back(key, value);
}

void TextDoc::set_double(const std::string& section, const std::string& key, double value)
{
	set(section, key, format_double(value));
}

void TextDoc::set_long(const std::string& section, const std::string& key, long value)
{
	set(section, key, std::to_string(value));
}

std::string TextDoc::format_double(double v)
{
	char buf[40];
	std::snprintf(buf, sizeof(buf), "%.17g", v);
	return buf;
}

std::string TextDoc::serialize() const
{
	std::ostringstream out;
	bool first = true;
	for (const auto& s : sections_)
	{
		if (not first) out << "\n";
		first = false;
		if (not s.name.empty()) out << "[" << s.name << "]\n";
		for (const auto& [k, v] : s.entries) out << k << " = " << v << "\n";
	}
	return out.str();
}

void TextDoc::save(const std::string& path) const
{
	std::ofstream f(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot write " + path);
	f << serialize();
}

} // namespace blade
