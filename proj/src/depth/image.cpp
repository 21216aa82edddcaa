#include "blade/depth/image.h"

#include <cmath>

namespace blade {

ImageF laplacian(const ImageF& img)
{
	ImageF out(img.width(), img.height());
	const long w = static_cast<long>(img.width());
	const long h = static_cast<long>(img.height());
	for (long y = 0; y < h; ++y)
	{
		for (long x = 0; x < w; ++x)
		{
			const float c = img.at_clamped(x, y);
			out(x, y) = img.at_clamped(x - 1, y) + img.at_clamped(x + 1, y) +
			            img.at_clamped(x, y - 1) + img.at_clamped(x, y + 1) - 4.f * c;
		}
	}
	return out;
}

ImageF gaussian_blur(const ImageF& img, double sigma)
{
	if (sigma <= 0.0) return img;

	const long radius = std::max(1l, static_cast<long>(std::ceil(3.0 * sigma)));
	std::vector<double> kernel(2 * radius + 1);
	double sum = 0.0;
	for (long i = -radius; i <= radius; ++i)
	{
		kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
		sum += kernel[i + radius];
	}
	for (auto& k : kernel) k /= sum;

	const long w = static_cast<long>(img.width());
	const long h = static_cast<long>(img.height());
	ImageF tmp(img.width(), img.height());
	for (long y = 0; y < h; ++y)
	{
		for (long x = 0; x < w; ++x)
		{
			double acc = 0.0;
			for (long i = -radius; i <= radius; ++i) acc += kernel[i + radius] * img.at_clamped(x + i, y);
			tmp(x, y) = static_cast<float>(acc);
		}
	}
	ImageF out(img.width(), img.height());
	for (long y = 0; y < h; ++y)
	{
		for (long x = 0; x < w; ++x)
		{
			double acc = 0.0;
			for (long i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at_clamped(x, y + i);
			out(x, y) = static_cast<float>(acc);
		}
	}
	return out;
}

} // namespace blade
