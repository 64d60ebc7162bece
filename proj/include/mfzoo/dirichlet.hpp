#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mfzoo/fourier.hpp"
#include "mfzoo/numeric.hpp"

namespace mfzoo {

// Σ_{k=1}^{N} a_k k^{-s}; a[0] holds a_1.
struct DirichletSeries {
    std::vector<cplx> a;

    std::int64_t n_max() const { return static_cast<std::int64_t>(a.size()); }
    cplx coeff(std::int64_t k) const { return k >= 1 && k <= n_max() ? a[static_cast<std::size_t>(k - 1)] : cplx{}; }
    double h2_norm() const;
};

// Σ_{k=1}^{n} a_k k^{-1/2+it}, ascending and compensated.
cplx ds_partial_sum(const DirichletSeries& g, std::int64_t n, double t);
// Same sum at every n of an ascending list, in one pass.
std::vector<cplx> ds_partial_sums(const DirichletSeries& g, std::span<const std::int64_t> ns, double t);

enum class Layout { unit, log, general };

// Piecewise constant on [t_0, t_P): values[i] on [breaks[i], breaks[i+1]).
// Unit layout: breaks k; log layout: breaks log k (k >= 1), piece lengths log1p(1/k).
struct HalfLineFunction {
    Layout layout = Layout::general;
    std::vector<double> breaks;
    std::vector<cplx> values;

    std::size_t pieces() const { return values.size(); }
    double start(std::size_t i) const;
    double length(std::size_t i) const;
    double end() const { return breaks.empty() ? 0.0 : breaks.back(); }
    double norm2_squared() const;

    static HalfLineFunction general(std::vector<double> breaks, std::vector<cplx> values);
};

// F = a_k on [k, k+1), k >= 0.
HalfLineFunction fs_to_fi(std::span<const cplx> a);
// G = b_k / (log(k+1) - log k)^{1/2} on [log k, log(k+1)).
HalfLineFunction ds_to_fi(const DirichletSeries& g);

struct BesselReport {
    DirichletSeries g;
    double coeff_energy = 0.0;  // Σ|b_k|²
    double norm_squared = 0.0;  // ‖G‖² over [0, log(N+1))
    bool holds = true;          // within 1e-12 relative
};

// b_k = ∫_{log k}^{log(k+1)} G(u) e^{u/2} du for k <= N, N the largest k with
// log(k+1) <= end of G, optionally capped by n_cap.
BesselReport fi_to_ds(const HalfLineFunction& G, std::int64_t n_cap = -1);

// ∫_{t_0}^{R} F(u) e^{itu} du in closed form.
cplx fi_partial_integral(const HalfLineFunction& F, double R, double t);

struct DsIndex {
    double beta_minus = 0.0;
    double beta_plus = 0.0;
    std::vector<double> values;
    std::size_t tail_begin = 0;
};

// Needs >= 4 points, n >= 3, log log n spaced by >= 0.1.
DsIndex ds_divergence_index(const std::function<cplx(std::int64_t)>& partial, std::span<const std::int64_t> schedule);
DsIndex ds_divergence_index(const DirichletSeries& g, double t, std::span<const std::int64_t> schedule);

// Powers of two in [3, n_max] kept greedily while log log n grows by >= 0.1.
std::vector<std::int64_t> ds_schedule(std::int64_t n_max);

// fi_to_ds(fs_to_fi(nonnegative-frequency coefficients of f)), N = frequency ceiling.
BesselReport compose_multifractal_ds(const BlockFunction& f);
// Angle of x ∈ [0,1) moved to [-π, π).
double angle_of_point(double x);

// ∫_0^1 |g(1/2 - it)|² dt / ‖g‖², Gauss-Legendre on `panels` panels.
double embedding_check(const DirichletSeries& g, int panels = 64);

// |∫_0^R G e^{itu} du - Σ_{k<=n} b_k k^{-1/2+it}|. The bridge constants divide
// this by (1+|t|)‖g‖ (G = ds_to_fi(b)) or (1+|t|)‖G‖ (b = fi_to_ds(G)).
double bridge_gap(const HalfLineFunction& G, const DirichletSeries& b, std::int64_t n, double R, double t);

struct FiLocalizationReport {
    double R = 0.0;
    double norm = 0.0;  // ‖G‖₂
    std::size_t qualifying = 0;
    double delta = 0.0; // NaN when nothing qualifies
};

// Ĝ_R(τ) = ∫_{-R}^{R} G(u) e^{iτu} du; scores ‖Ĝ_R‖_{L²(I)} R^{1/2} log R / |Ĝ_R(t)| with
// I = [t - 1/(2R), t + 1/(2R)] at every t where |Ĝ_R(t)| >= ‖G‖₂.
FiLocalizationReport fi_localization_check(const HalfLineFunction& G, double R, std::span<const double> ts);
cplx truncated_transform(const HalfLineFunction& G, double R, double tau);

} // namespace mfzoo
