#include "mfzoo/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "mfzoo/error.hpp"
#include "mfzoo/fft.hpp"

namespace mfzoo {

using std::numbers::pi;

namespace {

// e^{2πi n x} with the phase reduced in long double.
cplx unit(std::int64_t n, double x)
{
    const long double t = static_cast<long double>(n) * static_cast<long double>(x);
    const double f = static_cast<double>(t - std::floor(t));
    return {std::cos(2 * pi * f), std::sin(2 * pi * f)};
}

// Σ_{n=a}^{b} c[n - base] e^{2πinx}, phases by recurrence resynced every 64 terms.
cplx eval_segment(const std::vector<cplx>& c, std::int64_t base, std::int64_t a, std::int64_t b, double x)
{
    CompensatedSum<cplx> acc;
    const cplx step = unit(1, x);
    cplx w;
    for (std::int64_t n = a; n <= b; ++n) {
        if ((n - a) % 64 == 0)
            w = unit(n, x);
        const cplx& v = c[static_cast<std::size_t>(n - base)];
        if (v != cplx{})
            acc.add(v * w);
        w *= step;
    }
    return acc.value();
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

cplx TrigPolynomial::coeff(std::int64_t n) const
{
    if (coeffs.empty() || n < n_min || n > n_max())
        return {};
    return coeffs[static_cast<std::size_t>(n - n_min)];
}

cplx TrigPolynomial::partial(std::int64_t n, double x) const
{
    if (coeffs.empty())
        return {};
    std::int64_t lo = n_min, hi = n_max();
    if (n >= 0) {
        lo = std::max(lo, -n);
        hi = std::min(hi, n);
    }
    if (lo > hi)
        return {};
    if (real) {
        double v = lo <= 0 && 0 <= hi ? coeff(0).real() : 0.0;
        if (hi >= 1)
            v += 2 * eval_segment(coeffs, n_min, std::max<std::int64_t>(lo, 1), hi, x).real();
        return {v, 0.0};
    }
    return eval_segment(coeffs, n_min, lo, hi, x);
}

std::vector<cplx> TrigPolynomial::grid_values(std::size_t G) const
{
    if (!is_pow2(G))
        throw DomainError("grid size must be a power of two");
    std::vector<cplx> buf(G);
    if (coeffs.empty())
        return buf;
    if (static_cast<std::int64_t>(G) <= n_max() - n_min)
        throw DomainError("grid too small for the coefficient window");
    const auto g = static_cast<std::int64_t>(G);
    for (std::int64_t n = n_min; n <= n_max(); ++n)
        buf[static_cast<std::size_t>(((n % g) + g) % g)] += coeff(n);
    auto out = dft(buf, +1);
    if (real)
        for (auto& v : out)
            v = {v.real(), 0.0};
    return out;
}

std::pair<std::int64_t, std::int64_t> TrigPolynomial::band() const
{
    std::int64_t lo = -1, hi = -1;
    for (std::int64_t n = n_min; n <= n_max(); ++n) {
        if (coeff(n) == cplx{})
            continue;
        const std::int64_t a = n < 0 ? -n : n;
        lo = lo < 0 ? a : std::min(lo, a);
        hi = std::max(hi, a);
    }
    return {lo, hi};
}

double TrigPolynomial::norm2_squared() const
{
    CompensatedSum<double> acc;
    for (const auto& c : coeffs)
        acc.add(std::norm(c));
    return acc.value();
}

TrigPolynomial TrigPolynomial::constant(cplx c)
{
    TrigPolynomial t;
    t.coeffs = {c};
    t.real = c.imag() == 0.0;
    return t;
}

TrigPolynomial TrigPolynomial::monomial(std::int64_t n, cplx c)
{
    TrigPolynomial t;
    t.n_min = n;
    t.coeffs = {c};
    return t;
}

TrigPolynomial TrigPolynomial::trimmed() const
{
    const auto [lo, hi] = band();
    if (hi < 0)
        return {};
    std::int64_t a = n_min, b = n_max();
    if (real) {
        a = -hi;
        b = hi;
    } else {
        while (coeff(a) == cplx{})
            ++a;
        while (coeff(b) == cplx{})
            --b;
    }
    TrigPolynomial t;
    t.n_min = a;
    t.real = real;
    t.coeffs.assign(coeffs.begin() + (a - n_min), coeffs.begin() + (b - n_min) + 1);
    return t;
}

double Chi::operator()(double x) const
{
    const std::uint64_t cells = pow2u(scale);
    x -= std::floor(x);
    const double h = std::ldexp(1.0, -scale);
    const std::uint64_t i = std::min(cells - 1, static_cast<std::uint64_t>(x / h));
    auto in = [&](std::uint64_t k) { return std::binary_search(intervals.begin(), intervals.end(), k % cells); };
    if (in(i))
        return 1.0;
    double d = INFINITY;
    if (in(i + cells - 1))
        d = x - static_cast<double>(i) * h;
    if (in(i + 1))
        d = std::min(d, static_cast<double>(i + 1) * h - x);
    return std::max(0.0, 1.0 - d / h);
}

double Chi::norm_p_power(double p) const
{
    const std::uint64_t cells = pow2u(scale);
    const double h = std::ldexp(1.0, -scale);
    auto in = [&](std::uint64_t k) { return std::binary_search(intervals.begin(), intervals.end(), k % cells); };
    std::vector<std::uint64_t> cand;
    for (auto k : intervals)
        for (std::uint64_t d : {cells - 1, std::uint64_t{0}, std::uint64_t{1}})
            cand.push_back((k + d) % cells);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    CompensatedSum<double> acc;
    for (auto i : cand) {
        if (in(i)) {
            acc.add(h);
            continue;
        }
        const bool L = in(i + cells - 1), R = in(i + 1);
        if (L && R)
            acc.add(2 * h * (1 - std::pow(0.5, p + 1)) / (p + 1));
        else if (L || R)
            acc.add(h / (p + 1));
    }
    return acc.value();
}

std::vector<double> Chi::samples(std::size_t G) const
{
    std::vector<double> v(G);
    for (std::size_t i = 0; i < G; ++i)
        v[i] = (*this)(static_cast<double>(i) / static_cast<double>(G));
    return v;
}

Chi build_chi(std::vector<std::uint64_t> intervals, int scale)
{
    if (scale < 0 || scale > 40)
        throw DomainError("chi scale out of range");
    if (intervals.empty())
        throw DomainError("empty cover");
    std::sort(intervals.begin(), intervals.end());
    intervals.erase(std::unique(intervals.begin(), intervals.end()), intervals.end());
    if (intervals.back() >= pow2u(scale))
        throw DomainError("cover interval index out of range");
    return {scale, std::move(intervals)};
}

TrigPolynomial fejer_approx(std::span<const double> samples, std::int64_t N)
{
    const std::size_t G = samples.size();
    if (N < 0)
        throw DomainError("negative Fejer order");
    if (!is_pow2(G) || static_cast<std::int64_t>(G) < 4 * N)
        throw DomainError("Fejer grid must be a power of two of size at least 4N");
    std::vector<cplx> in(samples.begin(), samples.end());
    const auto hat = dft(in, -1);
    TrigPolynomial t;
    t.n_min = -N;
    t.real = true;
    t.coeffs.resize(static_cast<std::size_t>(2 * N + 1));
    const double inv = 1.0 / static_cast<double>(G);
    t.coeffs[N] = {hat[0].real() * inv, 0.0};
    for (std::int64_t n = 1; n <= N; ++n) {
        const cplx c = hat[n] * inv * (1.0 - static_cast<double>(n) / static_cast<double>(N + 1));
        t.coeffs[N + n] = c;
        t.coeffs[N - n] = std::conj(c);
    }
    return t;
}

TrigPolynomial fejer_approx(std::span<const cplx> samples, std::int64_t N)
{
    const std::size_t G = samples.size();
    if (N < 0)
        throw DomainError("negative Fejer order");
    if (!is_pow2(G) || static_cast<std::int64_t>(G) < 4 * N)
        throw DomainError("Fejer grid must be a power of two of size at least 4N");
    const auto hat = dft(samples, -1);
    TrigPolynomial t;
    t.n_min = -N;
    t.coeffs.resize(static_cast<std::size_t>(2 * N + 1));
    const auto g = static_cast<std::int64_t>(G);
    for (std::int64_t n = -N; n <= N; ++n) {
        const double w = 1.0 - static_cast<double>(n < 0 ? -n : n) / static_cast<double>(N + 1);
        t.coeffs[static_cast<std::size_t>(n + N)] = hat[static_cast<std::size_t>((n + g) % g)] * (w / static_cast<double>(G));
    }
    return t;
}

TrigPolynomial build_Q(const TrigPolynomial& P, int m)
{
    if (m < 1 || m > 60)
        throw DomainError("modulation exponent out of range");
    const std::int64_t half = std::int64_t{1} << (m - 1), shift = std::int64_t{1} << m;
    const auto [lo, hi] = P.band();
    if (hi > half)
        throw StageError("build_Q", m, "spectrum of P exceeds 2^{m-1}");
    TrigPolynomial Q;
    if (hi < 0)
        return Q;
    const std::int64_t top = shift + hi;
    Q.n_min = -top;
    Q.real = P.real;
    Q.coeffs.assign(static_cast<std::size_t>(2 * top + 1), cplx{});
    const cplx two_i{0.0, 2.0};
    for (std::int64_t n = -top; n <= top; ++n) {
        if (P.real && n < 0)
            continue;
        const cplx v = (P.coeff(n - shift) - P.coeff(n + shift)) / two_i;
        Q.coeffs[static_cast<std::size_t>(n + top)] = v;
        if (P.real && n > 0)
            Q.coeffs[static_cast<std::size_t>(-n + top)] = std::conj(v);
    }
    if (P.real)
        Q.coeffs[static_cast<std::size_t>(top)] = {Q.coeffs[static_cast<std::size_t>(top)].real(), 0.0};
    return Q;
}

std::vector<std::uint64_t> cover_from_points(std::span<const double> points, int scale, std::size_t cap)
{
    std::unordered_map<std::uint64_t, std::size_t> count;
    for (double x : points)
        ++count[cube_of_point(x, scale).index];
    std::vector<std::pair<std::uint64_t, std::size_t>> v(count.begin(), count.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < v.size() && i < cap; ++i)
        out.push_back(v[i].first);
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t BlockFunction::M(int k) const { return std::int64_t{1} << (schedule.m(k) - 1); }
std::int64_t BlockFunction::N(int k) const { return 3 * M(k); }

cplx BlockFunction::partial_sum(std::int64_t n, double x) const
{
    double re = constant.real(), im = constant.imag();
    for (const auto& b : blocks) {
        if (n >= 0 && n < M(b.k))
            continue;
        const double v = b.weight * b.Q.partial(n >= N(b.k) ? -1 : n, x).real();
        (b.channel == Channel::real ? re : im) += v;
    }
    return {re, im};
}

double BlockFunction::norm2_squared() const
{
    std::map<int, std::vector<cplx>> byk;
    for (const auto& b : blocks) {
        auto& acc = byk[b.k];
        const std::int64_t top = N(b.k);
        acc.resize(static_cast<std::size_t>(2 * top + 1));
        const cplx w = b.channel == Channel::real ? cplx{b.weight, 0.0} : cplx{0.0, b.weight};
        for (std::int64_t n = b.Q.n_min; n <= b.Q.n_max(); ++n)
            acc[static_cast<std::size_t>(n + top)] += w * b.Q.coeff(n);
    }
    CompensatedSum<double> s;
    s.add(std::norm(constant));
    for (const auto& [k, acc] : byk)
        for (const auto& c : acc)
            s.add(std::norm(c));
    return s.value();
}

BlockFunction BlockFunction::merged() const
{
    BlockFunction out;
    out.schedule = schedule;
    out.constant = constant;
    std::map<std::pair<int, int>, Block> acc;
    for (const auto& b : blocks) {
        auto& m = acc[{b.k, b.channel == Channel::real ? 0 : 1}];
        const std::int64_t top = N(b.k);
        if (m.Q.coeffs.empty()) {
            m = {b.k, 1.0, b.channel, {}};
            m.Q.n_min = -top;
            m.Q.real = true;
            m.Q.coeffs.assign(static_cast<std::size_t>(2 * top + 1), cplx{});
        }
        m.Q.real = m.Q.real && b.Q.real;
        for (std::int64_t n = b.Q.n_min; n <= b.Q.n_max(); ++n)
            m.Q.coeffs[static_cast<std::size_t>(n + top)] += b.weight * b.Q.coeff(n);
    }
    for (auto& [key, b] : acc)
        out.blocks.push_back(std::move(b));
    return out;
}

void BlockFunction::validate() const
{
    std::vector<int> ks;
    for (const auto& b : blocks) {
        const auto [lo, hi] = b.Q.band();
        if (hi >= 0 && (lo < M(b.k) || hi > N(b.k)))
            throw StageError("spectrum", b.k, "block leaves its band");
        if (!(b.weight > 0.0))
            throw StageError("weight", b.k, "block weight must be positive");
        ks.push_back(b.k);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (std::size_t i = 0; i + 1 < ks.size(); ++i)
        if (N(ks[i]) >= M(ks[i + 1]))
            throw StageError("spectrum", ks[i + 1], "bands overlap");
}

BlockBuild build_block_function(const std::function<std::vector<std::uint64_t>(int k, int scale)>& covers,
                                const BlockBuildOptions& o, std::span<const double> points)
{
    if (!(o.p >= 1.0) || !(o.s > 0.0 && o.s <= 1.0))
        throw DomainError("block function needs p >= 1 and s in (0,1]");
    BlockBuild out;
    out.f.schedule = o.schedule;
    if (o.k_max < o.k_min)
        return out;
    const std::size_t nk = static_cast<std::size_t>(o.k_max - o.k_min + 1);
    std::vector<std::vector<std::uint64_t>> cov(nk);
    for (std::size_t i = 0; i < nk; ++i) {
        const int k = o.k_min + static_cast<int>(i);
        cov[i] = covers(k, o.schedule.m(k) - 1);
        if (cov[i].empty())
            throw StageError("cover", k, "empty cover");
    }
    std::vector<Block> blocks(nk);
    std::vector<BlockDiagnostics> diag(nk);
    parallel_for(nk, [&](std::size_t i) {
        const int k = o.k_min + static_cast<int>(i);
        const int m = o.schedule.m(k);
        auto& d = diag[i];
        d.k = k;
        d.m = m;
        d.cover_size = cov[i].size();
        const Chi chi = build_chi(cov[i], m - 1);
        const std::size_t G = pow2u(m + 2);
        auto g = chi.samples(G);
        for (std::size_t c = 0; c < chi.intervals.size(); c += 1 + chi.intervals.size() / 64) {
            const double mid = (static_cast<double>(chi.intervals[c]) + 0.5) * std::ldexp(1.0, -(m - 1));
            if (chi(mid) != 1.0)
                throw StageError("chi", k, "bump is not 1 on its cover");
        }
        if (std::any_of(g.begin(), g.end(), [](double v) { return v < 0.0 || v > 1.0; }))
            throw StageError("chi", k, "bump leaves [0,1]");
        d.chi_norm_p = std::pow(chi.norm_p_power(o.p), 1.0 / o.p);
        d.gauge = std::exp2((m - 1) * (1 - o.s) / o.p);
        for (auto& v : g)
            v *= d.gauge;
        const auto P = fejer_approx(g, std::int64_t{1} << (m - 1));
        const auto pv = P.grid_values(G);
        d.fejer_min = INFINITY;
        for (const auto& v : pv)
            d.fejer_min = std::min(d.fejer_min, v.real());
        if (d.fejer_min < -1e-9)
            throw StageError("fejer", k, "Fejer sum is negative");
        TrigPolynomial Q;
        try {
            Q = build_Q(P, m);
        } catch (const StageError& e) {
            throw StageError("spectrum", k, e.what());
        }
        d.c_measured = NAN;
        for (double x : points) {
            if (!std::binary_search(chi.intervals.begin(), chi.intervals.end(), cube_of_point(x, m - 1).index))
                continue;
            const double q = P(x).real() / d.gauge;
            d.c_measured = std::isnan(d.c_measured) ? q : std::min(d.c_measured, q);
        }
        const int t = k + o.parity_offset;
        const double j = std::floor(t / 2.0);
        blocks[i] = {k, 1.0 / (j * j), t % 2 == 0 ? Channel::real : Channel::imaginary, std::move(Q)};
    });
    out.f.blocks = std::move(blocks);
    out.diagnostics = std::move(diag);
    out.f.validate();
    return out;
}

BlockBuild build_block_function(std::span<const double> points, const BlockBuildOptions& o)
{
    std::vector<double> pts(points.begin(), points.end());
    return build_block_function(
        [&](int, int scale) {
            const auto cap = static_cast<std::size_t>(std::ceil(std::exp2(scale * o.s) - 1e-9));
            return cover_from_points(pts, scale, cap);
        },
        o, pts);
}

SparseSchedule fourier_point_schedule() { return SparseSchedule{}.shifted(1); }

FourierFamily build_fourier_family(const FourierFamilyOptions& o)
{
    FourierFamily fam;
    fam.alphas = o.alphas;
    fam.f.schedule = SparseSchedule{};
    const auto pts_schedule = fourier_point_schedule();
    for (std::size_t i = 0; i < o.alphas.size(); ++i) {
        const double a = o.alphas[i];
        const double w = 1.0 / static_cast<double>((i + 1) * (i + 1));
        if (!(a > 0.0 && a <= 1.0))
            throw DomainError("family alpha outside (0,1]");
        if (a == 1.0) {
            fam.f.constant += w * cplx(1.0, 1.0) / std::sqrt(2.0);
            BlockFunction c;
            c.constant = w * cplx(1.0, 1.0) / std::sqrt(2.0);
            fam.members.push_back(c);
            fam.points.emplace_back();
            fam.diagnostics.emplace_back();
            continue;
        }
        const auto rule = f_alpha_rule(a, pts_schedule);
        std::vector<double> pts(static_cast<std::size_t>(o.samples_per_alpha));
        const std::uint64_t base = o.seed + 1000003ULL * i;
        parallel_for(pts.size(), [&](std::size_t t) { pts[t] = sample_point(rule, o.sample_depth, base + t).value(); });
        BlockBuildOptions bo;
        bo.s = std::min(1.0, a + o.alpha_margin);
        bo.p = o.p;
        bo.k_min = 2;
        bo.k_max = o.k_max;
        auto b = build_block_function(pts, bo);
        for (auto& blk : b.f.blocks)
            blk.weight *= w;
        fam.members.push_back(b.f);
        for (auto& blk : b.f.blocks)
            fam.f.blocks.push_back(std::move(blk));
        fam.points.push_back(std::move(pts));
        fam.diagnostics.push_back(std::move(b.diagnostics));
    }
    fam.f = fam.f.merged();
    fam.f.validate();
    return fam;
}

DivergenceIndex fs_divergence_index(const std::function<cplx(std::int64_t)>& partial,
                                    std::span<const std::int64_t> schedule)
{
    if (schedule.size() < 3)
        throw InsufficientData("divergence index needs at least 3 schedule points");
    DivergenceIndex d;
    for (auto n : schedule) {
        if (n < 2)
            throw DomainError("schedule points must be at least 2");
        const double a = std::abs(partial(n));
        d.values.push_back(a > 0.0 ? std::log(a) / std::log(static_cast<double>(n)) : -INFINITY);
    }
    const std::size_t len = d.values.size();
    d.tail_begin = len - (len + 1) / 2;
    d.beta_minus = -INFINITY;
    d.beta_plus = INFINITY;
    for (std::size_t i = d.tail_begin; i < len; ++i) {
        d.beta_minus = std::max(d.beta_minus, d.values[i]);
        d.beta_plus = std::min(d.beta_plus, d.values[i]);
    }
    return d;
}

DivergenceIndex fs_divergence_index(const BlockFunction& f, double x, int k_max)
{
    std::vector<std::int64_t> ns;
    for (int k = 1; k <= k_max; ++k)
        ns.push_back(f.N(k));
    return fs_divergence_index([&](std::int64_t n) { return f.partial_sum(n, x); }, ns);
}

LocalizationReport localization_check(const TrigPolynomial& f, int j, double p, std::span<const double> xs)
{
    if (j < 1 || j > 24)
        throw DomainError("localization level out of range");
    if (!(p >= 1.0))
        throw DomainError("p must be at least 1");
    LocalizationReport rep;
    rep.j = j;
    rep.p = p;
    const std::int64_t n = std::int64_t{1} << j;
    TrigPolynomial S;
    S.real = f.real;
    S.n_min = std::max(f.n_min, -n);
    const std::int64_t top = std::min(f.n_max(), n);
    if (!f.empty() && S.n_min <= top)
        S.coeffs.assign(f.coeffs.begin() + (S.n_min - f.n_min), f.coeffs.begin() + (top - f.n_min) + 1);
    const std::size_t G = pow2u(j + 6);
    const auto v = S.grid_values(G);
    std::vector<double> pw(G);
    for (std::size_t i = 0; i < G; ++i)
        pw[i] = std::pow(std::abs(v[i]), p);
    rep.global_norm = std::pow(compensated_sum(pw) / static_cast<double>(G), 1.0 / p);
    rep.delta = NAN;
    const std::size_t per = G >> j;
    for (double x : xs) {
        const double sx = std::abs(S(x));
        if (!(sx > 0.0) || sx < rep.global_norm)
            continue;
        ++rep.qualifying;
        const std::uint64_t k = cube_of_point(x, j).index;
        CompensatedSum<double> acc;
        const std::size_t start = ((k + pow2u(j) - 1) % pow2u(j)) * per;
        for (std::size_t t = 0; t < 3 * per; ++t)
            acc.add(pw[(start + t) % G]);
        const double local = std::pow(acc.value() / static_cast<double>(G), 1.0 / p);
        const double r = local * std::pow(j, 3.0 / p) * std::exp2(j / p) / sx;
        rep.delta = std::isnan(rep.delta) ? r : std::min(rep.delta, r);
    }
    return rep;
}

} // namespace mfzoo
