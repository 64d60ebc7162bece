#include "mfzoo/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace mfzoo {

double compensated_sum(std::span<const double> v)
{
    CompensatedSum<double> acc;
    for (double x : v)
        acc.add(x);
    return acc.value();
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    LinearFit fit;
    if (n == 0)
        return fit;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    if (syy > 0.0) {
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            sse += r * r;
        }
        fit.r2 = 1.0 - sse / syy;
    }
    return fit;
}

namespace {
std::atomic<unsigned> g_threads{0};

unsigned default_threads()
{
    if (const char* env = std::getenv("MFZOO_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}
} // namespace

unsigned max_threads()
{
    unsigned t = g_threads.load();
    if (t == 0) {
        t = default_threads();
        g_threads.store(t);
    }
    return t;
}

void set_max_threads(unsigned n) { g_threads.store(std::max(1u, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(max_threads(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load())
                    return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true))
                        failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace mfzoo
