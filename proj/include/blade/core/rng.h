#pragma once

#include <cstdint>
#include <cmath>

namespace blade {

/// Counter-based generator: the stream for a given (seed, key) pair is independent of
/// call order and thread scheduling, which keeps multi-threaded outputs reproducible.
class CounterRng
{
public:
	CounterRng(std::uint64_t seed, std::uint64_t key)
	: state_{mix(seed ^ (0x9e3779b97f4a7c15ull * (key + 1)))}
	{
	}

	std::uint64_t next_u64()
	{
		state_ += 0x9e3779b97f4a7c15ull;
		return mix(state_);
	}

	/// uniform in [0, 1)
	double next_double()
	{
		return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
	}

	/// standard normal (Box-Muller)
	double next_normal()
	{
		double u1 = next_double();
		double u2 = next_double();
		if (u1 < 1e-300) u1 = 1e-300;
		return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
	}

private:
	static std::uint64_t mix(std::uint64_t z)
	{
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
		return z ^ (z >> 31);
	}

	std::uint64_t state_;
};

} // namespace blade
