#include "mfzoo/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "mfzoo/error.hpp"
#include "mfzoo/fft.hpp"

namespace mfzoo {

using std::numbers::pi;

CircleFunction CircleFunction::from_grid(GridFunction g)
{
    CircleFunction f;
    f.nonneg_ = std::all_of(g.values.begin(), g.values.end(), [](double v) { return v >= 0.0; });
    f.grid_ = std::move(g);
    return f;
}

CircleFunction CircleFunction::from_modes(std::vector<cplx> modes)
{
    if (modes.size() % 2 != 1)
        throw DomainError("mode vector needs odd length 2N+1");
    CircleFunction f;
    f.modes_ = std::move(modes);
    return f;
}

const GridFunction& CircleFunction::grid() const
{
    if (!grid_)
        throw DomainError("circle function is not a grid");
    return *grid_;
}

std::vector<cplx> CircleFunction::to_modes(int N) const
{
    std::vector<cplx> out(2 * static_cast<std::size_t>(N) + 1);
    if (!grid_) {
        const int B = bandwidth();
        for (int n = -std::min(N, B); n <= std::min(N, B); ++n)
            out[n + N] = modes_[n + B];
        return out;
    }
    const auto& g = *grid_;
    const double h = std::ldexp(1.0, -g.depth);
    for (int n = -N; n <= N; ++n) {
        CompensatedSum<cplx> acc;
        if (n == 0) {
            for (double v : g.values)
                acc.add(v * h);
        } else {
            // ∫_cell e^{-2πinξ} = e^{-2πin(a+h/2)} sin(πnh)/(πn)
            const double s = std::sin(pi * n * h) / (pi * n);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double c = (static_cast<double>(i) + 0.5) * h;
                const double ph = -2 * pi * std::fmod(n * c, 1.0);
                acc.add(g.values[i] * s * cplx(std::cos(ph), std::sin(ph)));
            }
        }
        out[n + N] = acc.value();
    }
    return out;
}

CircleFunction CircleFunction::abs() const
{
    GridFunction g = grid();
    for (auto& v : g.values)
        v = std::fabs(v);
    return from_grid(std::move(g));
}

namespace {

void check_radius(double r)
{
    if (!(r >= 0.0 && r < 1.0))
        throw DomainError("radius must lie in [0,1)");
}

// ∫_a^b P_r for 0 <= a <= b <= 1/2, as one arctangent difference.
double arc_half(double A, double a, double b)
{
    const double num = A * std::sin(pi * (b - a));
    const double den = std::cos(pi * a) * std::cos(pi * b) + A * A * std::sin(pi * a) * std::sin(pi * b);
    return std::atan2(num, den) / pi;
}

} // namespace

double kernel_arc(double r, double a, double b)
{
    check_radius(r);
    if (!(b >= a))
        throw DomainError("kernel_arc needs a <= b");
    if (b - a >= 1.0)
        return 1.0;
    const double A = (1 + r) / (1 - r);
    const double s = a - std::floor(a + 0.5);
    const double e = s + (b - a);
    double total = 0.0;
    double c = s;
    for (double cut : {0.0, 0.5, 1.0, 1.5}) {
        if (cut <= c)
            continue;
        const double d = std::min(cut, e);
        if (cut == 0.0)
            total += arc_half(A, -d, -c);
        else if (cut == 0.5)
            total += arc_half(A, c, d);
        else if (cut == 1.0)
            total += arc_half(A, 1 - d, 1 - c);
        else
            total += arc_half(A, c - 1, d - 1);
        c = d;
        if (c >= e)
            break;
    }
    return total;
}

std::vector<double> kernel_weights(double r, std::size_t M)
{
    check_radius(r);
    const double h = 1.0 / static_cast<double>(M);
    std::vector<double> w(M);
    for (std::size_t m = 0; m < M; ++m) {
        const double c = (m <= M / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(M)) * h;
        w[m] = kernel_arc(r, c - h / 2, c + h / 2);
    }
    return w;
}

std::vector<double> kernel_cell_pairs(double r, std::size_t M)
{
    check_radius(r);
    const double h = 1.0 / static_cast<double>(M);
    std::vector<double> w(M);
    for (std::size_t m = 0; m <= M / 2; ++m) {
        const double c = static_cast<double>(m) * h;
        w[m] = boost::math::quadrature::gauss<double, 10>::integrate(
            [&](double t) { return kernel_arc(r, c - t, c + t); }, 0.0, h);
        if (m > 0 && m < M - m)
            w[M - m] = w[m];
    }
    return w;
}

double poisson_extend(const CircleFunction& f, double r, double theta)
{
    check_radius(r);
    if (!f.is_grid()) {
        const int N = f.bandwidth();
        CompensatedSum<double> acc;
        for (int n = -N; n <= N; ++n) {
            const double ph = 2 * pi * std::fmod(n * theta, 1.0);
            acc.add((f.modes()[n + N] * std::pow(r, std::abs(n)) * cplx(std::cos(ph), std::sin(ph))).real());
        }
        return acc.value();
    }
    const auto& g = f.grid();
    const double h = std::ldexp(1.0, -g.depth);
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.values[i] == 0.0)
            continue;
        const double a = static_cast<double>(i) * h;
        acc.add(g.values[i] * kernel_arc(r, theta - a - h, theta - a));
    }
    return acc.value();
}

int poisson_resolution_log2(const CircleFunction& f, int J)
{
    return std::max(J, f.is_grid() ? f.grid().depth : 0) + 4;
}

std::vector<double> poisson_level(const CircleFunction& f, int j, int L)
{
    if (j < 0 || j > L)
        throw DomainError("level outside the quadrature grid");
    const double r = 1.0 - std::ldexp(1.0, -j);
    const std::size_t cubes = pow2u(j);
    std::vector<double> out(cubes);
    if (!f.is_grid()) {
        const int N = f.bandwidth();
        const double h = std::ldexp(1.0, -j);
        for (std::size_t k = 0; k < cubes; ++k) {
            CompensatedSum<double> acc;
            const double c = (static_cast<double>(k) + 0.5) * h;
            for (int n = -N; n <= N; ++n) {
                if (n == 0) {
                    acc.add(f.modes()[N].real() * h);
                    continue;
                }
                const double ph = 2 * pi * std::fmod(n * c, 1.0);
                const double s = std::sin(pi * n * h) / (pi * n);
                acc.add((f.modes()[n + N] * std::pow(r, std::abs(n)) * s * cplx(std::cos(ph), std::sin(ph))).real());
            }
            out[k] = acc.value();
        }
        return out;
    }
    const auto& g = f.grid();
    if (g.depth > L)
        throw DomainError("quadrature grid coarser than the source");
    const std::size_t M = pow2u(L);
    std::vector<double> fine(M);
    for (std::size_t i = 0; i < M; ++i)
        fine[i] = g.values[i >> (L - g.depth)];
    const auto u = circular_convolve(fine, kernel_cell_pairs(r, M));
    const std::size_t per = M / cubes;
    for (std::size_t k = 0; k < cubes; ++k)
        out[k] = compensated_sum(std::span(u).subspan(k * per, per));
    return out;
}

PoissonField poisson_field(const CircleFunction& f, int J)
{
    if (J < 0 || J > 20)
        throw DomainError("field depth out of range");
    PoissonField pf;
    pf.resolution_log2 = poisson_resolution_log2(f, J);
    pf.abs_taken = !f.nonneg();
    std::vector<std::vector<double>> levels(J + 1);
    parallel_for(levels.size(), [&](std::size_t j) { levels[j] = poisson_level(f, static_cast<int>(j), pf.resolution_log2); });
    pf.field = CoefficientField(J, std::move(levels),
                                {{"source", "poisson"}, {"resolution_log2", pf.resolution_log2}, {"abs_taken", pf.abs_taken}});
    return pf;
}

HarnackReport harnack_check(const CircleFunction& f, int j, int samples, std::uint64_t seed)
{
    if (j < 0)
        throw DomainError("negative level");
    HarnackReport rep;
    rep.level = j;
    const auto e = poisson_level(f, j, poisson_resolution_log2(f, j));
    std::mt19937_64 rng(seed);
    rep.min_ratio = INFINITY;
    rep.max_ratio = 0.0;
    const double r0 = 1.0 - std::ldexp(1.0, -j), dr = std::ldexp(1.0, -j - 1);
    for (int s = 0; s < samples; ++s) {
        const double x = uniform01(rng);
        const double r = r0 + uniform01(rng) * dr;
        const double den = std::ldexp(e[cube_of_point(x, j).index], j);
        if (!(den > 0.0)) {
            ++rep.skipped;
            continue;
        }
        const double q = poisson_extend(f, r, x) / den;
        rep.min_ratio = std::min(rep.min_ratio, q);
        rep.max_ratio = std::max(rep.max_ratio, q);
        ++rep.samples;
    }
    if (rep.samples == 0)
        rep.min_ratio = 0.0;
    return rep;
}

RadialIndex radial_divergence_index(const CoefficientField& field, double x, const Window& window)
{
    RadialIndex ri;
    ri.estimate = estimate_exponents(field, x, window);
    ri.beta_minus = std::clamp(1.0 - ri.estimate.upper, 0.0, 1.0);
    ri.beta_plus = std::clamp(1.0 - ri.estimate.lower, 0.0, 1.0);
    return ri;
}

RadialIndex radial_divergence_index(const CircleFunction& f, double x, int J)
{
    return radial_divergence_index(poisson_field(f, J).field, x, Window{1, J});
}

GridFunction spike_ladder(double x0, double beta0, int J)
{
    auto g = GridFunction::zeros(J);
    for (int j = 1; j <= J; ++j) {
        const auto c = cube_of_point(x0, j);
        const double a = (1 - std::exp2(-beta0)) * std::exp2(j * beta0);
        const std::size_t w = std::size_t{1} << (J - j);
        for (std::size_t i = c.index * w; i < (c.index + 1) * w; ++i)
            g.values[i] += a;
    }
    return g;
}

} // namespace mfzoo
