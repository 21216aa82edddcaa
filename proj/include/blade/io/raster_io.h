#pragma once

#include "blade/depth/image.h"

#include <cstdint>
#include <string>
#include <vector>

namespace blade {

// Portable Float Map ("Pf", little-endian, rows bottom-to-top).
void write_pfm(const ImageF& img, const std::string& path);
ImageF read_pfm(const std::string& path);

// Binary PGM (P5); maxval 255 or 65535. Values are clamped to [0, 1] before quantization.
void write_pgm(const ImageF& img, const std::string& path, int maxval = 65535);
ImageF read_pgm(const std::string& path); // normalized back to [0, 1]

// Binary PPM (P3-bytes, P6) from separate 8-bit channels.
struct ImageRgb8
{
	std::size_t width = 0, height = 0;
	std::vector<std::uint8_t> data; // interleaved rgb

	static ImageRgb8 create(std::size_t w, std::size_t h)
	{
		return {w, h, std::vector<std::uint8_t>(w * h * 3, 0)};
	}
	void set(std::size_t x, std::size_t y, std::uint8_t r, std::uint8_t g, std::uint8_t b)
	{
		auto* px = &data[(y * width + x) * 3];
		px[0] = r; px[1] = g; px[2] = b;
	}
};

void write_ppm(const ImageRgb8& img, const std::string& path);

/// Jet-style false color for normalized t in [0, 1]; invalid entries map to black.
void false_color(double t, std::uint8_t& r, std::uint8_t& g, std::uint8_t& b);

// ASCII xyz point cloud, one "x y z" triple per line.
void write_xyz(const std::vector<P3D>& points, const std::string& path);
std::vector<P3D> read_xyz(const std::string& path);

} // namespace blade
