#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mfzoo/dyadic.hpp"

namespace mfzoo {

// Sparse positions m_1 < m_2 < ... with m_{k+1} - m_k >= 3. Digits at
// m_k, m_k+1, m_k+2 are forced to 0, 1, 0 on the compact set K.
class SparseSchedule {
public:
    // m_k = (k+1)^2.
    SparseSchedule();
    // Finite explicit schedule; no forcing past the last entry.
    explicit SparseSchedule(std::vector<int> terms);

    // Same rule with every m_k moved by `offset`.
    SparseSchedule shifted(int offset) const;

    bool is_default_rule() const { return explicit_.empty(); }
    const std::vector<int>& terms() const { return explicit_; }
    int offset() const { return offset_; }
    int m(int k) const;               // k >= 1
    int count_upto(int n) const;      // card{k : m_k <= n}
    int forced_digit(int pos) const;  // -1 on free positions
    bool in_omega(int pos) const { return forced_digit(pos) < 0; }
    int u(int n) const;               // card(Omega_n)
    std::vector<int> terms_upto(int n) const;

private:
    std::vector<int> explicit_;
    int offset_ = 0;
};

// Finite binary word eps_1..eps_n; digits[i] holds eps_{i+1}.
struct DigitString {
    std::vector<std::uint8_t> digits;

    int size() const { return static_cast<int>(digits.size()); }
    int digit(int pos) const { return digits.at(static_cast<std::size_t>(pos - 1)); }
    // value = numerator / 2^n, exactly.
    mpz_class numerator() const;
    double value() const;
    std::string numerator_decimal() const;
    DyadicCube cube() const;  // only for n <= 62

    static DigitString from_cube(const DyadicCube& c);
    static DigitString from_bits(std::initializer_list<int> bits);
};

struct BesicovitchParams {
    double delta = 0.5;
    double alpha = 1.0;
    double theta = 0.75;

    static BesicovitchParams from_alpha(double alpha, double theta = 0.75);
    static BesicovitchParams from_delta(double delta, double theta = 0.75);
};

// Binary entropy on (0, 1/2].
double alpha_of_delta(double delta);
// Inverse of alpha_of_delta by bisection on (0, 1/2].
double delta_of_alpha(double alpha);

bool k_admissible(const DigitString& word, const SparseSchedule& schedule);

enum class SampleMode { k_measure, plain };

struct KMeasureRule {
    SparseSchedule schedule;
    double delta = 0.5;
};

struct SampleRule {
    SampleMode mode = SampleMode::k_measure;
    KMeasureRule rule;
};

// Measure carried by K (delta = 1/2).
SampleRule k_rule(const SparseSchedule& schedule = {});
// Bernoulli(delta(alpha)) on free positions, forcing elsewhere: supported by E_delta ∩ K.
SampleRule f_alpha_rule(double alpha, const SparseSchedule& schedule = {});
SampleRule plain_rule(double delta);

DigitString sample_point(const SampleRule& rule, int depth, std::uint64_t seed);

double measure_mass(const KMeasureRule& rule, const DigitString& word);
double log2_measure_mass(const KMeasureRule& rule, const DigitString& word);
double measure_mass(const KMeasureRule& rule, const DyadicCube& cube);

struct CubeMass {
    std::uint64_t index;
    double mass;
};
// Admissible cubes of level n with their masses (n <= 40).
std::vector<CubeMass> level_masses(const KMeasureRule& rule, int n);

// Admissible cubes of K at every level 0..depth.
LevelSetGrid admissible_grid(const SparseSchedule& schedule, int depth);

struct SineEntry {
    int k = 0;
    int m = 0;
    int shift = 0;             // exponent e in 2^e x
    mpz_class frac_numerator;  // frac(2^e x) = frac_numerator / 2^frac_bits
    int frac_bits = 0;
    double frac = 0.0;
    double sine = 0.0;
    bool in_interval = false;  // frac in [1/4, 3/8], decided on integers
};

struct SineReport {
    std::vector<SineEntry> entries;
    bool pass = true;
};

// For each k with m_k <= n, the fractional part of 2^{m_k - 1} x and the
// sine of 2 pi times it. The word is padded with its forced digits (zeros
// elsewhere) up to m_k + 2. Throws DomainError on inadmissible words.
SineReport sine_check(const DigitString& word, const SparseSchedule& schedule = {});

struct Frequency {
    double full = 0.0;
    double restricted = 0.0;
    double bound = 0.0;  // 3 card{k : m_k <= n} / n
};

Frequency empirical_frequency(const DigitString& word, const SparseSchedule& schedule = {});

std::string sample_batch_csv(const SampleRule& rule, int depth, std::uint64_t first_seed, int count);

} // namespace mfzoo
