#pragma once

#include "blade/core/types.h"

#include <cstddef>
#include <vector>

namespace blade {

/// Grayscale float image, row-major, intensities nominally in [0, 1].
class ImageF
{
public:
	ImageF() = default;
	ImageF(std::size_t width, std::size_t height, float fill = 0.f)
	: width_{width}, height_{height}, data_(width * height, fill)
	{
	}

	std::size_t width() const { return width_; }
	std::size_t height() const { return height_; }
	bool empty() const { return data_.empty(); }

	float operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
	float& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }

	const std::vector<float>& data() const { return data_; }
	std::vector<float>& data() { return data_; }

	bool contains(double x, double y) const
	{
		return x >= 0.0 and y >= 0.0 and x <= static_cast<double>(width_ - 1) and
		       y <= static_cast<double>(height_ - 1);
	}

	/// Bilinear sample; out-of-bounds positions return `outside`.
	float sample(double x, double y, float outside = 0.f) const
	{
		if (not contains(x, y)) return outside;
		const std::size_t x0 = static_cast<std::size_t>(x);
		const std::size_t y0 = static_cast<std::size_t>(y);
		const std::size_t x1 = std::min(x0 + 1, width_ - 1);
		const std::size_t y1 = std::min(y0 + 1, height_ - 1);
		const double fx = x - static_cast<double>(x0);
		const double fy = y - static_cast<double>(y0);
		const double top = (1.0 - fx) * (*this)(x0, y0) + fx * (*this)(x1, y0);
		const double bot = (1.0 - fx) * (*this)(x0, y1) + fx * (*this)(x1, y1);
		return static_cast<float>((1.0 - fy) * top + fy * bot);
	}

	/// Clamped pixel access (replicate border).
	float at_clamped(long x, long y) const
	{
		const long cx = std::clamp(x, 0l, static_cast<long>(width_) - 1);
		const long cy = std::clamp(y, 0l, static_cast<long>(height_) - 1);
		return (*this)(static_cast<std::size_t>(cx), static_cast<std::size_t>(cy));
	}

private:
	std::size_t width_ = 0, height_ = 0;
	std::vector<float> data_;
};

/// 5-point Laplacian with replicate padding.
ImageF laplacian(const ImageF& img);

/// Separable Gaussian blur, kernel truncated at 3 sigma. sigma = 0 returns a copy.
ImageF gaussian_blur(const ImageF& img, double sigma);

} // namespace blade
