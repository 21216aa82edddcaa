#include "blade/io/plot.h"

#include "blade/io/text_doc.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace blade {

namespace {

void draw_line(ImageRgb8& img, double x0, double y0, double x1, double y1,
               std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
	const int steps = static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))) + 1;
	for (int i = 0; i <= steps; ++i)
	{
		const double t = static_cast<double>(i) / steps;
		const long x = std::lround(x0 + (x1 - x0) * t);
		const long y = std::lround(y0 + (y1 - y0) * t);
		if (x >= 0 and y >= 0 and x < static_cast<long>(img.width) and y < static_cast<long>(img.height))
			img.set(x, y, r, g, b);
	}
}

} // namespace

void write_plot(const std::vector<PlotSeries>& series, const std::string& path,
                std::size_t width, std::size_t height)
{
	ImageRgb8 img = ImageRgb8::create(width, height);
	for (std::size_t y = 0; y < height; ++y)
		for (std::size_t x = 0; x < width; ++x) img.set(x, y, 255, 255, 255);

	double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
	for (const auto& s : series)
		for (std::size_t i = 0; i < s.x.size(); ++i)
		{
			xmin = std::min(xmin, s.x[i]);
			xmax = std::max(xmax, s.x[i]);
			ymin = std::min(ymin, s.y[i]);
			ymax = std::max(ymax, s.y[i]);
		}
	if (xmax <= xmin) { xmax = xmin + 1.0; }
	if (ymax <= ymin) { ymax = ymin + 1.0; }
	const double margin_y = 0.05 * (ymax - ymin);
	ymin -= margin_y;
	ymax += margin_y;

	const double px0 = 50, px1 = static_cast<double>(width) - 15;
	const double py0 = static_cast<double>(height) - 30, py1 = 15;
	auto to_px = [&](double x) { return px0 + (x - xmin) / (xmax - xmin) * (px1 - px0); };
	auto to_py = [&](double y) { return py0 + (y - ymin) / (ymax - ymin) * (py1 - py0); };

	// axes, plus the zero line when visible
	draw_line(img, px0, py0, px1, py0, 0, 0, 0);
	draw_line(img, px0, py0, px0, py1, 0, 0, 0);
	if (ymin < 0.0 and ymax > 0.0)
		draw_line(img, px0, to_py(0.0), px1, to_py(0.0), 180, 180, 180);

	for (const auto& s : series)
	{
		for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
			draw_line(img, to_px(s.x[i]), to_py(s.y[i]), to_px(s.x[i + 1]), to_py(s.y[i + 1]),
			          s.r, s.g, s.b);
		for (std::size_t i = 0; i < s.x.size(); ++i) // sample markers
		{
			const long cx = std::lround(to_px(s.x[i]));
			const long cy = std::lround(to_py(s.y[i]));
			for (long dy = -1; dy <= 1; ++dy)
				for (long dx = -1; dx <= 1; ++dx)
				{
					const long x = cx + dx, y = cy + dy;
					if (x >= 0 and y >= 0 and x < static_cast<long>(width) and y < static_cast<long>(height))
						img.set(x, y, s.r, s.g, s.b);
				}
		}
	}
	write_ppm(img, path);
}

void write_tsv(const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& path)
{
	std::ofstream f(path, std::ios::binary);
	if (not f) throw std::runtime_error("cannot write " + path);
	for (std::size_t c = 0; c < columns.size(); ++c)
		f << columns[c] << (c + 1 < columns.size() ? "\t" : "\n");
	for (const auto& row : rows)
	{
		for (std::size_t c = 0; c < row.size(); ++c)
			f << TextDoc::format_double(row[c]) << (c + 1 < row.size() ? "\t" : "\n");
	}
}

} // namespace blade
