#include "blade/io/raster_io.h"

#include "blade/io/text_doc.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blade {

namespace {

void open_out(std::ofstream& f, const std::string& path)
{
	f.open(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot write " + path);
}

void open_in(std::ifstream& f, const std::string& path)
{
	f.open(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot open " + path);
}

std::string next_token(std::istream& in)
{
	std::string tok;
	in >> tok;
	while (tok.size() and tok[0] == '#') // comment line
	{
		std::string rest;
		std::getline(in, rest);
		in >> tok;
	}
	return tok;
}

} // namespace

void write_pfm(const ImageF& img, const std::string& path)
{
	std::ofstream f;
	open_out(f, path);
	f << "Pf\n" << img.width() << " " << img.height() << "\n-1.0\n";
	// bottom-to-top row order
	for (std::size_t row = img.height(); row-- > 0;)
		f.write(reinterpret_cast<const char*>(&img.data()[row * img.width()]),
		        static_cast<std::streamsize>(img.width() * sizeof(float)));
}

ImageF read_pfm(const std::string& path)
{
	std::ifstream f;
	open_in(f, path);
	const std::string magic = next_token(f);
	if (magic != "Pf") throw std::runtime_error(path + ": not a grayscale PFM");
	const std::size_t w = std::stoul(next_token(f));
	const std::size_t h = std::stoul(next_token(f));
	const double scale = std::stod(next_token(f));
	f.get(); // single whitespace before the raster
	ImageF img(w, h);
	for (std::size_t row = h; row-- > 0;)
		f.read(reinterpret_cast<char*>(&img.data()[row * w]),
		       static_cast<std::streamsize>(w * sizeof(float)));
	if (not f) throw std::runtime_error(path + ": truncated PFM");
	if (scale > 0) // big-endian file
	{
		for (auto& v : img.data())
		{
			char* b = reinterpret_cast<char*>(&v);
			std::swap(b[0], b[3]);
			std::swap(b[1], b[2]);
		}
	}
	return img;
}

void write_pgm(const ImageF& img, const std::string& path, int maxval)
{
	std::ofstream f;
	open_out(f, path);
	f << "P5\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
	if (maxval > 255)
	{
		std::vector<std::uint8_t> row(img.width() * 2);
		for (std::size_t y = 0; y < img.height(); ++y)
		{
			for (std::size_t x = 0; x < img.width(); ++x)
			{
				const double v = std::clamp(static_cast<double>(img(x, y)), 0.0, 1.0);
				const auto q = static_cast<std::uint16_t>(std::lround(v * maxval));
				row[2 * x] = static_cast<std::uint8_t>(q >> 8); // big-endian per netpbm
				row[2 * x + 1] = static_cast<std::uint8_t>(q & 0xff);
			}
			f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
		}
	}
	else
	{
		std::vector<std::uint8_t> row(img.width());
		for (std::size_t y = 0; y < img.height(); ++y)
		{
			for (std::size_t x = 0; x < img.width(); ++x)
			{
				const double v = std::clamp(static_cast<double>(img(x, y)), 0.0, 1.0);
				row[x] = static_cast<std::uint8_t>(std::lround(v * maxval));
			}
			f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
		}
	}
}

ImageF read_pgm(const std::string& path)
{
	std::ifstream f;
	open_in(f, path);
	const std::string magic = next_token(f);
	if (magic != "P5") throw std::runtime_error(path + ": not a binary PGM");
	const std::size_t w = std::stoul(next_token(f));
	const std::size_t h = std::stoul(next_token(f));
	const int maxval = std::stoi(next_token(f));
	f.get();
	ImageF img(w, h);
	if (maxval > 255)
	{
		std::vector<std::uint8_t> row(w * 2);
		for (std::size_t y = 0; y < h; ++y)
		{
			f.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
			for (std::size_t x = 0; x < w; ++x)
				img(x, y) = static_cast<float>(((row[2 * x] << 8) | row[2 * x + 1]) / static_cast<double>(maxval));
		}
	}
	else
	{
		std::vector<std::uint8_t> row(w);
		for (std::size_t y = 0; y < h; ++y)
		{
			f.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
			for (std::size_t x = 0; x < w; ++x)
				img(x, y) = static_cast<float>(row[x] / static_cast<double>(maxval));
		}
	}
	if (not f) throw std::runtime_error(path + ": truncated PGM");
	return img;
}

void write_ppm(const ImageRgb8& img, const std::string& path)
{
	std::ofstream f;
	open_out(f, path);
	f << "P6\n" << img.width << " " << img.height << "\n255\n";
	f.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
}

void false_color(double t, std::uint8_t& r, std::uint8_t& g, std::uint8_t& b)
{
	t = std::clamp(t, 0.0, 1.0);
	auto ramp = [](double v) {
		return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
	};
	r = ramp(1.5 - std::abs(4.0 * t - 3.0));
	g = ramp(1.5 - std::abs(4.0 * t - 2.0));
	b = ramp(1.5 - std::abs(4.0 * t - 1.0));
}

void write_xyz(const std::vector<P3D>& points, const std::string& path)
{
	std::ofstream f;
	open_out(f, path);
	for (const auto& p : points)
		f << TextDoc::format_double(p.x()) << " " << TextDoc::format_double(p.y()) << " "
		  << TextDoc::format_double(p.z()) << "\n";
}

std::vector<P3D> read_xyz(const std::string& path)
{
	std::ifstream f;
	open_in(f, path);
	std::vector<P3D> pts;
	double x, y, z;
	std::string line;
	while (std::getline(f, line))
	{
		if (line.empty() or line[0] == '#') continue;
		std::istringstream ls(line);
		if (ls >> x >> y >> z) pts.emplace_back(x, y, z);
	}
	return pts;
}

} // namespace blade
