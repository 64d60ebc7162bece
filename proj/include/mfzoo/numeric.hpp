#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace mfzoo {

using cplx = std::complex<double>;

// Neumaier compensated accumulator.
template <class T>
class CompensatedSum {
public:
    void add(T v)
    {
        T t = sum_ + v;
        if (abs_(sum_) >= abs_(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    static double abs_(double v) { return std::fabs(v); }
    static double abs_(const cplx& v) { return std::max(std::fabs(v.real()), std::fabs(v.imag())); }
    T sum_{};
    T comp_{};
};

double compensated_sum(std::span<const double> v);

inline std::uint64_t pow2u(int j) { return std::uint64_t{1} << j; }

// Uniform double in [0,1) from the top 53 bits; keeps streams portable
// across standard libraries (std::uniform_real_distribution is not).
inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

// Unweighted least squares of y on x. r2 is 1 when y is constant.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Worker count: MFZOO_THREADS if set, else hardware concurrency.
unsigned max_threads();
void set_max_threads(unsigned n);

// Runs fn(i) for i in [0, n); fn must only touch slot i of shared output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace mfzoo
