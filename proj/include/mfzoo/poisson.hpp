#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mfzoo/dyadic.hpp"
#include "mfzoo/haar.hpp"
#include "mfzoo/numeric.hpp"

namespace mfzoo {

// f on the circle θ ∈ [0,1), either piecewise constant on a dyadic grid or
// given by Fourier modes c_{-N}..c_N (modes[n + N]).
class CircleFunction {
public:
    static CircleFunction from_grid(GridFunction g);
    static CircleFunction from_modes(std::vector<cplx> modes);

    bool is_grid() const { return grid_.has_value(); }
    const GridFunction& grid() const;
    const std::vector<cplx>& modes() const { return modes_; }
    int bandwidth() const { return static_cast<int>(modes_.size() / 2); }
    bool nonneg() const { return nonneg_; }

    // Fourier modes |n| <= N of the represented function.
    std::vector<cplx> to_modes(int N) const;
    CircleFunction abs() const;  // grid only

private:
    std::optional<GridFunction> grid_;
    std::vector<cplx> modes_;
    bool nonneg_ = false;
};

// ∫_a^b P_r(t) dt for the normalized kernel (1 - r²)/|1 - r e^{2πit}|², b - a <= 1.
double kernel_arc(double r, double a, double b);

// Kernel cell masses w[m] = ∫_{(m-1/2)h}^{(m+1/2)h} P_r, h = 1/M, m mod M.
std::vector<double> kernel_weights(double r, std::size_t M);

// W[m] = ∫_{cell 0}∫_{cell m} P_r(ξ - η) dη dξ = ∫ P_r(s) (h - |s - mh|)_+ ds,
// by Gauss-Legendre in the half-width. Accurate when h <= (1 - r)/16.
std::vector<double> kernel_cell_pairs(double r, std::size_t M);

// P[f](r, θ); grid inputs integrate the kernel exactly over each cell.
double poisson_extend(const CircleFunction& f, double r, double theta);

struct PoissonField {
    CoefficientField field;
    int resolution_log2 = 0;
    bool abs_taken = false;  // source was not known to be nonnegative
};

// Fine grid 2^{max(J, depth)+4}.
int poisson_resolution_log2(const CircleFunction& f, int J);

// e_λ = ∫_λ P[f]((1 - 2^{-j}) ξ) dσ(ξ), j = 0..J. Grid sources go through
// kernel_cell_pairs on the fine grid; mode sources are integrated exactly.
PoissonField poisson_field(const CircleFunction& f, int J);

// Level j only; the harnack check needs nothing else.
std::vector<double> poisson_level(const CircleFunction& f, int j, int resolution_log2);

struct HarnackReport {
    int level = 0;
    int samples = 0;
    int skipped = 0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

// P[f](r,x) / (2^j e_{I_j(x)}) at random x and r ∈ [1 - 2^{-j}, 1 - 2^{-j-1}].
HarnackReport harnack_check(const CircleFunction& f, int j, int samples, std::uint64_t seed);

struct RadialIndex {
    double beta_minus = 0.0;  // 1 - upper index
    double beta_plus = 0.0;   // 1 - lower index
    ExponentEstimate estimate;
};

RadialIndex radial_divergence_index(const CoefficientField& field, double x, const Window& window);
RadialIndex radial_divergence_index(const CircleFunction& f, double x, int J);

// Σ_{j=1}^{J} w 2^{-j(1-β0)} 2^j 1_{I_j(x0)} on a grid of depth J, with
// w = 1 - 2^{-β0} so the partial sums at x0 telescope to about 2^{jβ0}.
GridFunction spike_ladder(double x0, double beta0, int J);

} // namespace mfzoo
