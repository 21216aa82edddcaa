#include "blade/core/parallel.h"

namespace blade {

namespace {
unsigned g_threads = 0;
}

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count()
{
	if (g_threads > 0) return g_threads;
	const unsigned hw = std::thread::hardware_concurrency();
	return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& fn)
{
	const std::size_t n = end > begin ? end - begin : 0;
	if (n == 0) return;

	const unsigned workers = thread_count();
	if (workers <= 1 or n == 1)
	{
		for (std::size_t i = begin; i < end; ++i) fn(i);
		return;
	}

	const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 8));
	std::atomic<std::size_t> next{begin};

	auto body = [&]() {
		for (;;)
		{
			const std::size_t lo = next.fetch_add(chunk);
			if (lo >= end) return;
			const std::size_t hi = std::min(end, lo + chunk);
			for (std::size_t i = lo; i < hi; ++i) fn(i);
		}
	};

	std::vector<std::thread> pool;
	pool.reserve(workers - 1);
	for (unsigned t = 0; t + 1 < workers; ++t) pool.emplace_back(body);
	body();
	for (auto& th : pool) th.join();
}

} // namespace blade
