#include "mfzoo/fractal_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mfzoo/error.hpp"
#include "mfzoo/numeric.hpp"

namespace mfzoo {

namespace {

int isqrt(int n)
{
    if (n <= 0)
        return 0;
    int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

} // namespace

SparseSchedule::SparseSchedule() = default;

SparseSchedule::SparseSchedule(std::vector<int> terms) : explicit_(std::move(terms))
{
    if (explicit_.empty())
        throw DomainError("explicit schedule needs at least one term");
    if (explicit_.front() < 1)
        throw DomainError("schedule terms must be positive");
    for (std::size_t i = 1; i < explicit_.size(); ++i)
        if (explicit_[i] - explicit_[i - 1] < 3)
            throw DomainError("schedule gap m_{k+1} - m_k must be at least 3");
}

SparseSchedule SparseSchedule::shifted(int offset) const
{
    SparseSchedule s = *this;
    if (s.explicit_.empty()) {
        s.offset_ += offset;
        if (4 + s.offset_ < 1)
            throw DomainError("shift moves m_1 below 1");
    } else {
        for (int& t : s.explicit_)
            t += offset;
        if (s.explicit_.front() < 1)
            throw DomainError("shift moves m_1 below 1");
    }
    return s;
}

int SparseSchedule::m(int k) const
{
    if (k < 1)
        throw DomainError("schedule index starts at 1");
    if (explicit_.empty())
        return (k + 1) * (k + 1) + offset_;
    if (static_cast<std::size_t>(k) > explicit_.size())
        throw DomainError("explicit schedule has no term " + std::to_string(k));
    return explicit_[static_cast<std::size_t>(k - 1)];
}

int SparseSchedule::count_upto(int n) const
{
    if (explicit_.empty()) {
        const int r = isqrt(n - offset_);
        return std::max(0, r - 1);
    }
    return static_cast<int>(std::upper_bound(explicit_.begin(), explicit_.end(), n) - explicit_.begin());
}

int SparseSchedule::forced_digit(int pos) const
{
    const int c = count_upto(pos);
    if (c == 0)
        return -1;
    const int d = pos - m(c);
    if (d == 0 || d == 2)
        return 0;
    if (d == 1)
        return 1;
    return -1;
}

int SparseSchedule::u(int n) const
{
    const int c = count_upto(n);
    if (c == 0)
        return n;
    return n - 3 * (c - 1) - std::min(3, n - m(c) + 1);
}

std::vector<int> SparseSchedule::terms_upto(int n) const
{
    std::vector<int> out;
    const int c = count_upto(n);
    for (int k = 1; k <= c; ++k)
        out.push_back(m(k));
    return out;
}

mpz_class DigitString::numerator() const
{
    mpz_class v = 0;
    for (auto d : digits) {
        v <<= 1;
        if (d)
            v += 1;
    }
    return v;
}

double DigitString::value() const
{
    double v = 0.0;
    const int n = std::min(size(), 64);
    for (int i = n; i >= 1; --i)
        v = (v + digits[static_cast<std::size_t>(i - 1)]) * 0.5;
    return v;
}

std::string DigitString::numerator_decimal() const { return numerator().get_str(10); }

DyadicCube DigitString::cube() const
{
    if (size() > 62)
        throw DomainError("word too long for a 64-bit cube index");
    std::uint64_t k = 0;
    for (auto d : digits)
        k = (k << 1) | d;
    return {size(), k};
}

DigitString DigitString::from_cube(const DyadicCube& c)
{
    DigitString w;
    w.digits.resize(static_cast<std::size_t>(c.level));
    for (int i = 1; i <= c.level; ++i)
        w.digits[static_cast<std::size_t>(i - 1)] = static_cast<std::uint8_t>((c.index >> (c.level - i)) & 1u);
    return w;
}

DigitString DigitString::from_bits(std::initializer_list<int> bits)
{
    DigitString w;
    for (int b : bits)
        w.digits.push_back(static_cast<std::uint8_t>(b != 0));
    return w;
}

BesicovitchParams BesicovitchParams::from_alpha(double alpha, double theta)
{
    if (!(theta > 0.5 && theta < 1.0))
        throw DomainError("theta must lie in (1/2, 1)");
    return {delta_of_alpha(alpha), alpha, theta};
}

BesicovitchParams BesicovitchParams::from_delta(double delta, double theta)
{
    if (!(theta > 0.5 && theta < 1.0))
        throw DomainError("theta must lie in (1/2, 1)");
    return {delta, alpha_of_delta(delta), theta};
}

double alpha_of_delta(double delta)
{
    if (!(delta > 0.0 && delta <= 0.5))
        throw DomainError("delta must lie in (0, 1/2]");
    if (delta == 0.5)
        return 1.0;
    const double l2 = std::numbers::ln2;
    return -(delta * std::log(delta) + (1.0 - delta) * std::log1p(-delta)) / l2;
}

double delta_of_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("alpha must lie in (0, 1]");
    if (alpha == 1.0)
        return 0.5;
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= 0.0 || mid == lo || mid == hi)
            break;
        if (alpha_of_delta(mid) < alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

bool k_admissible(const DigitString& word, const SparseSchedule& schedule)
{
    for (int pos = 1; pos <= word.size(); ++pos) {
        const int f = schedule.forced_digit(pos);
        if (f >= 0 && word.digit(pos) != f)
            return false;
    }
    return true;
}

SampleRule k_rule(const SparseSchedule& schedule) { return {SampleMode::k_measure, {schedule, 0.5}}; }

SampleRule f_alpha_rule(double alpha, const SparseSchedule& schedule)
{
    return {SampleMode::k_measure, {schedule, delta_of_alpha(alpha)}};
}

SampleRule plain_rule(double delta) { return {SampleMode::plain, {SparseSchedule{}, delta}}; }

DigitString sample_point(const SampleRule& rule, int depth, std::uint64_t seed)
{
    if (depth < 1)
        throw DomainError("sample depth must be at least 1");
    const double delta = rule.rule.delta;
    if (!(delta >= 0.0 && delta <= 1.0))
        throw DomainError("Bernoulli parameter outside [0,1]");
    std::mt19937_64 rng(seed);
    DigitString w;
    w.digits.resize(static_cast<std::size_t>(depth));
    for (int pos = 1; pos <= depth; ++pos) {
        // One draw per position in both modes keeps streams aligned.
        const double u = uniform01(rng);
        int d = u < delta ? 1 : 0;
        if (rule.mode == SampleMode::k_measure) {
            const int f = rule.rule.schedule.forced_digit(pos);
            if (f >= 0)
                d = f;
        }
        w.digits[static_cast<std::size_t>(pos - 1)] = static_cast<std::uint8_t>(d);
    }
    return w;
}

double log2_measure_mass(const KMeasureRule& rule, const DigitString& word)
{
    const double l1 = std::log2(rule.delta);
    const double l0 = std::log1p(-rule.delta) / std::numbers::ln2;
    CompensatedSum<double> acc;
    for (int pos = 1; pos <= word.size(); ++pos) {
        const int f = rule.schedule.forced_digit(pos);
        const int d = word.digit(pos);
        if (f >= 0) {
            if (d != f)
                return -std::numeric_limits<double>::infinity();
            continue;
        }
        acc.add(d ? l1 : l0);
    }
    return acc.value();
}

double measure_mass(const KMeasureRule& rule, const DigitString& word)
{
    double m = 1.0;
    for (int pos = 1; pos <= word.size(); ++pos) {
        const int f = rule.schedule.forced_digit(pos);
        const int d = word.digit(pos);
        if (f >= 0) {
            if (d != f)
                return 0.0;
            continue;
        }
        m *= d ? rule.delta : 1.0 - rule.delta;
    }
    return m;
}

double measure_mass(const KMeasureRule& rule, const DyadicCube& cube)
{
    return measure_mass(rule, DigitString::from_cube(cube));
}

std::vector<CubeMass> level_masses(const KMeasureRule& rule, int n)
{
    if (n < 0 || n > 40)
        throw DomainError("level_masses supports levels 0..40");
    std::vector<CubeMass> cur{{0, 1.0}};
    for (int pos = 1; pos <= n; ++pos) {
        const int f = rule.schedule.forced_digit(pos);
        std::vector<CubeMass> next;
        next.reserve(f >= 0 ? cur.size() : 2 * cur.size());
        for (const auto& c : cur) {
            if (f >= 0) {
                next.push_back({(c.index << 1) | static_cast<std::uint64_t>(f), c.mass});
            } else {
                next.push_back({c.index << 1, c.mass * (1.0 - rule.delta)});
                next.push_back({(c.index << 1) | 1u, c.mass * rule.delta});
            }
        }
        cur = std::move(next);
    }
    return cur;
}

LevelSetGrid admissible_grid(const SparseSchedule& schedule, int depth)
{
    if (depth < 0 || depth > 40)
        throw DomainError("admissible_grid supports depth 0..40");
    LevelSetGrid g;
    g.max_depth = depth;
    g.alpha = 1.0;
    g.cubes.resize(static_cast<std::size_t>(depth) + 1);
    g.cubes[0] = {0};
    for (int pos = 1; pos <= depth; ++pos) {
        const int f = schedule.forced_digit(pos);
        const auto& prev = g.cubes[static_cast<std::size_t>(pos - 1)];
        auto& out = g.cubes[static_cast<std::size_t>(pos)];
        for (auto k : prev) {
            if (f < 0 || f == 0)
                out.push_back(k << 1);
            if (f < 0 || f == 1)
                out.push_back((k << 1) | 1u);
        }
    }
    return g;
}

SineReport sine_check(const DigitString& word, const SparseSchedule& schedule)
{
    if (!k_admissible(word, schedule))
        throw DomainError("sine_check needs an admissible word");
    SineReport rep;
    const int n = word.size();
    const int kmax = schedule.count_upto(n);
    for (int k = 1; k <= kmax; ++k) {
        const int m = schedule.m(k);
        const int last = std::max(n, m + 2);
        SineEntry e;
        e.k = k;
        e.m = m;
        e.shift = m - 1;
        // frac(2^{m-1} x) = 0.eps_m eps_{m+1} ... eps_last in binary.
        mpz_class num = 0;
        for (int pos = m; pos <= last; ++pos) {
            int d;
            if (pos <= n) {
                d = word.digit(pos);
            } else {
                const int f = schedule.forced_digit(pos);
                d = f > 0 ? 1 : 0;
            }
            num <<= 1;
            if (d)
                num += 1;
        }
        e.frac_bits = last - m + 1;
        e.frac_numerator = num;
        const mpz_class quarter = mpz_class(1) << (e.frac_bits - 2);
        const mpz_class three_eighths = mpz_class(3) << (e.frac_bits - 3);
        e.in_interval = num >= quarter && num <= three_eighths;
        mpq_class q(num, mpz_class(1) << e.frac_bits);
        q.canonicalize();
        e.frac = q.get_d();
        e.sine = std::sin(2.0 * std::numbers::pi * e.frac);
        rep.pass = rep.pass && e.in_interval && e.sine >= std::numbers::sqrt2 / 2.0 - 1e-9;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

Frequency empirical_frequency(const DigitString& word, const SparseSchedule& schedule)
{
    const int n = word.size();
    if (n < 1)
        throw DomainError("empirical_frequency needs n >= 1");
    long ones = 0, free_ones = 0, free_count = 0;
    for (int pos = 1; pos <= n; ++pos) {
        const int d = word.digit(pos);
        ones += d;
        if (schedule.in_omega(pos)) {
            ++free_count;
            free_ones += d;
        }
    }
    Frequency f;
    f.full = static_cast<double>(ones) / n;
    f.restricted = free_count > 0 ? static_cast<double>(free_ones) / static_cast<double>(free_count) : 0.0;
    f.bound = 3.0 * schedule.count_upto(n) / n;
    return f;
}

std::string sample_batch_csv(const SampleRule& rule, int depth, std::uint64_t first_seed, int count)
{
    std::vector<std::string> lines(static_cast<std::size_t>(std::max(0, count)));
    parallel_for(lines.size(), [&](std::size_t i) {
        const std::uint64_t seed = first_seed + i;
        const auto w = sample_point(rule, depth, seed);
        const auto fr = empirical_frequency(w, rule.rule.schedule);
        std::ostringstream os;
        os.precision(17);
        os << seed << ',' << depth << ',' << w.numerator_decimal() << ',' << depth << ','
           << (k_admissible(w, rule.rule.schedule) ? "true" : "false") << ',' << fr.full << ','
           << fr.restricted << '\n';
        lines[i] = os.str();
    });
    std::string out = "seed,depth,value_numerator,value_denominator_pow2,admissible,freq_full,freq_restricted\n";
    for (const auto& l : lines)
        out += l;
    return out;
}

} // namespace mfzoo
