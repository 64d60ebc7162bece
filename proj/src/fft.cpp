#include "mfzoo/fft.hpp"

#include <mutex>

#include <fftw3.h>

#include "mfzoo/error.hpp"

namespace mfzoo {

namespace {
// The FFTW planner is not reentrant; execution is.
std::mutex planner_mutex;
} // namespace

std::vector<cplx> dft(std::span<const cplx> in, int sign)
{
    const int n = static_cast<int>(in.size());
    std::vector<cplx> out(in.size());
    if (n == 0)
        return out;
    std::vector<cplx> buf(in.begin(), in.end());
    auto* ip = reinterpret_cast<fftw_complex*>(buf.data());
    auto* op = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex);
        plan = fftw_plan_dft_1d(n, ip, op, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> circular_convolve(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw DomainError("convolution lengths differ");
    const int n = static_cast<int>(a.size());
    if (n == 0)
        return {};
    const int m = n / 2 + 1;
    std::vector<double> ra(a.begin(), a.end()), rb(b.begin(), b.end()), out(a.size());
    std::vector<cplx> fa(m), fb(m);
    fftw_plan pa, pb, pc;
    {
        std::lock_guard lock(planner_mutex);
        pa = fftw_plan_dft_r2c_1d(n, ra.data(), reinterpret_cast<fftw_complex*>(fa.data()), FFTW_ESTIMATE);
        pb = fftw_plan_dft_r2c_1d(n, rb.data(), reinterpret_cast<fftw_complex*>(fb.data()), FFTW_ESTIMATE);
        pc = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(fa.data()), out.data(), FFTW_ESTIMATE);
    }
    // Plans made with FFTW_ESTIMATE leave the inputs untouched until execution.
    ra.assign(a.begin(), a.end());
    rb.assign(b.begin(), b.end());
    fftw_execute(pa);
    fftw_execute(pb);
    for (int i = 0; i < m; ++i)
        fa[i] *= fb[i] / static_cast<double>(n);
    fftw_execute(pc);
    {
        std::lock_guard lock(planner_mutex);
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pc);
    }
    return out;
}

} // namespace mfzoo
