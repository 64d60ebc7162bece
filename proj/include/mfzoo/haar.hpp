#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mfzoo/dyadic.hpp"

namespace mfzoo {

// Piecewise constant function on [0,1) with 2^depth equal cells.
struct GridFunction {
    int depth = 0;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(int depth, std::vector<double> values);
    static GridFunction constant(int depth, double v);
    static GridFunction zeros(int depth) { return constant(depth, 0.0); }

    std::size_t size() const { return values.size(); }
    double norm2_squared() const;
    double norm1() const;
    double operator()(double x) const;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double c, const GridFunction& a);

// Block sums of f over every level 0..J, built pairwise from the cells.
std::vector<std::vector<double>> block_sums(const GridFunction& f);

// T_j f: block means on Λ_j.
GridFunction haar_partial_sum(const GridFunction& f, int j);

// e_λ = 2^{-j/2} T_j f on λ, levels 0..J.
CoefficientField haar_field(const GridFunction& f);

// mean = <f, 1>, detail[j][k] = <f, ψ_{j,k}> with ψ = +1 on the left half
// and -1 on the right half of the cube (sup-norm 1), levels 0..J-1.
struct HaarCoefficients {
    int depth = 0;
    double mean = 0.0;
    std::vector<std::vector<double>> detail;

    static HaarCoefficients zeros(int depth);
};

HaarCoefficients haar_transform(const GridFunction& f);
GridFunction haar_synthesize(const HaarCoefficients& c);

// f = Σ_λ 2^{j/2}|a_λ| 1_λ on a grid of the given depth (>= j).
GridFunction gf2_build_haar(int j, std::span<const double> a, int depth);

// Cube index sets per level; covers[j] lists indices in Λ_j.
using Cover = std::vector<std::vector<std::uint64_t>>;

// Σ_j w(j) f_j with f_j the GF2 build of a_λ = 2^{-jα} on covers[j]
// (j >= 1). Throws BudgetError when Σ_{Γ_j} 2^{-2jα} > 1 at some level.
GridFunction build_from_cover(const Cover& covers, double alpha, int depth,
                              const std::function<double(int)>& weight = {});

enum class CapRule { ceil, floor };

// Γ_j: the ⌈2^{2jα}⌉ (or floor) cubes of largest Bernoulli(δ(2α)) mass,
// i.e. fewest one-digits, ties by index. With `nested`, candidates at level
// j are children of Γ_{j-1}.
Cover besicovitch_covers(double alpha, int depth, CapRule cap = CapRule::ceil, bool nested = false);

struct SaturatingOptions {
    CapRule cap = CapRule::ceil;
    bool nested = false;
    // Family member t only charges cubes outside member t-1's cover.
    bool shell = true;
    // Optional cover source; defaults to besicovitch_covers.
    std::function<Cover(double alpha, int depth)> cover_source;
};

// Saturating function for the family {α_k} ⊂ (0, 1/2]. The member α = 1/2
// contributes the constant 1 (full covers, level weights summing to 1);
// each α < 1/2 adds Σ_{j≥1} (1 - 2^{-β}) f_j, β = 1/2 - α, where f_j is the
// GF2 build of min(2^{-jα}, card(Γ_j)^{-1/2}) on Γ_j.
GridFunction build_saturating(std::span<const double> alphas, int depth, const SaturatingOptions& opts = {});

struct BesovParams {
    double s = 0.5;
    double p = 2.0;
    double q = 2.0;

    // Throws DomainError unless s > 0, s < 1, p >= 1, q >= 1 and s - 1/p > 0.
    void validate() const;
};

// d_λ = max |detail_μ| over μ ⊂ 3λ, weighted by 2^{(s-1/p)j}; levels 0..J-1.
CoefficientField wavelet_leaders(const HaarCoefficients& c, const BesovParams& params);

double besov_norm(const HaarCoefficients& c, const BesovParams& params);

} // namespace mfzoo
