#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mfzoo/fractal_sets.hpp"
#include "mfzoo/numeric.hpp"

namespace mfzoo {

// Σ_{n=n_min}^{n_max} c(n) e^{2πinx}. With `real` set the window is symmetric,
// c(-n) = conj c(n), and evaluation returns c(0) + 2 Re Σ_{n>0}.
struct TrigPolynomial {
    std::int64_t n_min = 0;
    std::vector<cplx> coeffs;
    bool real = false;

    std::int64_t n_max() const { return n_min + static_cast<std::int64_t>(coeffs.size()) - 1; }
    bool empty() const { return coeffs.empty(); }
    cplx coeff(std::int64_t n) const;

    cplx operator()(double x) const { return partial(-1, x); }
    // Σ_{|m| <= n}; n < 0 means the whole polynomial.
    cplx partial(std::int64_t n, double x) const;
    // Values at i/G, i < G, for G a power of two above 2 max|n|.
    std::vector<cplx> grid_values(std::size_t G) const;

    // Smallest and largest |n| with a nonzero coefficient; {-1,-1} when zero.
    std::pair<std::int64_t, std::int64_t> band() const;
    double norm2_squared() const;  // Parseval

    static TrigPolynomial constant(cplx c);
    static TrigPolynomial monomial(std::int64_t n, cplx c);
    // Drop exact zeros at both ends of the window (keeps symmetry if real).
    TrigPolynomial trimmed() const;
};

// χ(x) = max(0, 1 - 2^{scale} dist(x, J)) with J the union of the closed
// intervals [k 2^{-scale}, (k+1) 2^{-scale}], distance taken on the circle.
struct Chi {
    int scale = 0;
    std::vector<std::uint64_t> intervals;  // sorted

    double operator()(double x) const;
    // Exact ∫ χ^p.
    double norm_p_power(double p) const;
    std::vector<double> samples(std::size_t G) const;  // at i/G
};

Chi build_chi(std::vector<std::uint64_t> intervals, int scale);

// Fejér sum of order N of the samples g(i/G): coefficients ĝ(n)(1 - |n|/(N+1)).
TrigPolynomial fejer_approx(std::span<const double> samples, std::int64_t N);
TrigPolynomial fejer_approx(std::span<const cplx> samples, std::int64_t N);

// Q = sin(2π 2^m x) P on coefficients. Throws StageError unless spec P ⊆ [-2^{m-1}, 2^{m-1}].
TrigPolynomial build_Q(const TrigPolynomial& P, int m);

// Intervals of generation `scale` holding the most points (ties by index), at most `cap`.
std::vector<std::uint64_t> cover_from_points(std::span<const double> points, int scale, std::size_t cap);

enum class Channel { real, imaginary };

struct Block {
    int k = 0;
    double weight = 0.0;
    Channel channel = Channel::real;
    TrigPolynomial Q;  // real-valued
};

struct BlockFunction {
    SparseSchedule schedule;
    cplx constant{0.0, 0.0};
    std::vector<Block> blocks;

    std::int64_t M(int k) const;  // 2^{m_k - 1}
    std::int64_t N(int k) const;  // 3 2^{m_k - 1}

    cplx operator()(double x) const { return partial_sum(-1, x); }
    cplx partial_sum(std::int64_t n, double x) const;
    double norm2_squared() const;
    // One block per (k, channel), weights folded into Q.
    BlockFunction merged() const;
    // Throws StageError("spectrum", k) when a block leaves ±[M_k, N_k] or two
    // different k share a frequency.
    void validate() const;
};

struct BlockDiagnostics {
    int k = 0;
    int m = 0;
    double gauge = 0.0;       // 2^{(m-1)(1-s)/p}
    double chi_norm_p = 0.0;  // ‖χ‖_p
    double fejer_min = 0.0;   // min of P on its sample grid
    double c_measured = 0.0;  // min P/gauge over points in the cover; NaN without points
    std::size_t cover_size = 0;
};

struct BlockBuildOptions {
    double s = 0.5;
    double p = 2.0;
    int k_min = 2;
    int k_max = 3;
    // k + parity_offset even gives the real channel; weight j^{-2}, j = (k + parity_offset)/2.
    int parity_offset = 0;
    SparseSchedule schedule;
};

struct BlockBuild {
    BlockFunction f;
    std::vector<BlockDiagnostics> diagnostics;
};

// covers(k) lists generation m_k - 1 intervals. `points` are only used to
// measure the P_k lower constant.
BlockBuild build_block_function(const std::function<std::vector<std::uint64_t>(int k, int scale)>& covers,
                                const BlockBuildOptions& opts, std::span<const double> points = {});

// Covers from a point set: cap ⌈2^{(m_k - 1) s}⌉.
BlockBuild build_block_function(std::span<const double> points, const BlockBuildOptions& opts);

struct FourierFamilyOptions {
    std::vector<double> alphas{1.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int k_max = 3;
    double p = 2.0;
    double alpha_margin = 0.05;
    int samples_per_alpha = 1000;
    int sample_depth = 64;
    std::uint64_t seed = 1;
};

struct FourierFamily {
    BlockFunction f;                     // merged
    std::vector<BlockFunction> members;  // per alpha, weights i^{-2} j^{-2}
    std::vector<double> alphas;
    std::vector<std::vector<double>> points;  // F_α samples per alpha (empty for α = 1)
    std::vector<std::vector<BlockDiagnostics>> diagnostics;
};

// Schedule on which positivity holds: forcing at m_k+1, m_k+2, m_k+3.
SparseSchedule fourier_point_schedule();

// Σ_i i^{-2} f_i over the alphas; α = 1 contributes the constant (1+i)/√2.
FourierFamily build_fourier_family(const FourierFamilyOptions& opts);

struct DivergenceIndex {
    double beta_minus = 0.0;  // max over the tail
    double beta_plus = 0.0;   // min over the tail
    std::vector<double> values;
    std::size_t tail_begin = 0;
};

DivergenceIndex fs_divergence_index(const std::function<cplx(std::int64_t n)>& partial,
                                    std::span<const std::int64_t> schedule);
DivergenceIndex fs_divergence_index(const BlockFunction& f, double x, int k_max);

struct LocalizationReport {
    int j = 0;
    double p = 2.0;
    double global_norm = 0.0;  // ‖S_{2^j} f‖_p
    std::size_t qualifying = 0;
    double delta = 0.0;        // min ratio; NaN when nothing qualifies
};

LocalizationReport localization_check(const TrigPolynomial& f, int j, double p, std::span<const double> xs);

} // namespace mfzoo
