#pragma once

#include "blade/io/raster_io.h"

#include <string>
#include <vector>

namespace blade {

/// Minimal line-plot rasterizer for offline reports.
struct PlotSeries
{
	std::string label;
	std::vector<double> x, y;
	std::uint8_t r = 220, g = 60, b = 40;
};

void write_plot(const std::vector<PlotSeries>& series, const std::string& path,
                std::size_t width = 640, std::size_t height = 420);

/// Tab-separated table; the first row carries the column names.
void write_tsv(const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& path);

} // namespace blade
