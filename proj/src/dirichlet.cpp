#include "mfzoo/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mfzoo/error.hpp"

namespace mfzoo {

using std::numbers::pi;

namespace {

// ∫_0^L e^{itu} du = L (e^{iθ} - 1)/(iθ), θ = tL, without cancellation.
cplx phase_integral(double L, double t)
{
    const double th = t * L;
    if (std::fabs(th) < 1e-8)
        return {L, L * th / 2};
    const double h = std::sin(th / 2);
    return cplx{std::sin(th), 2 * h * h} * (L / th);
}

// ∫_lo^hi G(u) e^{itu} du over the pieces of G, clipped.
cplx window_integral(const HalfLineFunction& G, double lo, double hi, double t)
{
    CompensatedSum<cplx> acc;
    for (std::size_t i = 0; i < G.pieces(); ++i) {
        const double s = G.start(i);
        if (s >= hi)
            break;
        const double L = G.length(i);
        const double a = std::max(s, lo);
        const double b = std::min(s + L, hi);
        if (b <= a || G.values[i] == cplx{})
            continue;
        // keep the exact piece length when the piece is not clipped
        const double len = (a == s && b == s + L) ? L : b - a;
        acc.add(G.values[i] * std::polar(1.0, t * a) * phase_integral(len, t));
    }
    return acc.value();
}

} // namespace

double DirichletSeries::h2_norm() const
{
    CompensatedSum<double> s;
    for (const auto& c : a)
        s.add(std::norm(c));
    return std::sqrt(s.value());
}

std::vector<cplx> ds_partial_sums(const DirichletSeries& g, std::span<const std::int64_t> ns, double t)
{
    std::vector<cplx> out;
    out.reserve(ns.size());
    CompensatedSum<cplx> acc;
    std::int64_t k = 0;
    for (auto n : ns) {
        if (n < 1 || n > g.n_max())
            throw DomainError("partial sum index out of range");
        if (n < k)
            throw DomainError("partial sum indices must be ascending");
        for (; k < n; ++k) {
            const cplx& c = g.a[static_cast<std::size_t>(k)];
            if (c == cplx{})
                continue;
            const double lk = std::log(static_cast<double>(k + 1));
            acc.add(c * std::polar(std::exp(-0.5 * lk), t * lk));
        }
        out.push_back(acc.value());
    }
    return out;
}

cplx ds_partial_sum(const DirichletSeries& g, std::int64_t n, double t)
{
    const std::int64_t ns[1] = {n};
    return ds_partial_sums(g, ns, t)[0];
}

double HalfLineFunction::start(std::size_t i) const
{
    return breaks[i];
}

double HalfLineFunction::length(std::size_t i) const
{
    switch (layout) {
    case Layout::unit:
        return 1.0;
    case Layout::log:
        return std::log1p(1.0 / static_cast<double>(i + 1));
    default:
        return breaks[i + 1] - breaks[i];
    }
}

double HalfLineFunction::norm2_squared() const
{
    CompensatedSum<double> s;
    for (std::size_t i = 0; i < pieces(); ++i)
        s.add(std::norm(values[i]) * length(i));
    return s.value();
}

HalfLineFunction HalfLineFunction::general(std::vector<double> breaks, std::vector<cplx> values)
{
    if (breaks.size() != values.size() + 1)
        throw DomainError("need one more breakpoint than values");
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1]))
            throw DomainError("breakpoints must increase");
    HalfLineFunction F;
    F.breaks = std::move(breaks);
    F.values = std::move(values);
    return F;
}

HalfLineFunction fs_to_fi(std::span<const cplx> a)
{
    HalfLineFunction F;
    F.layout = Layout::unit;
    F.values.assign(a.begin(), a.end());
    F.breaks.resize(a.size() + 1);
    for (std::size_t k = 0; k <= a.size(); ++k)
        F.breaks[k] = static_cast<double>(k);
    return F;
}

HalfLineFunction ds_to_fi(const DirichletSeries& g)
{
    HalfLineFunction G;
    G.layout = Layout::log;
    const auto N = static_cast<std::size_t>(g.n_max());
    G.breaks.resize(N + 1);
    G.values.resize(N);
    for (std::size_t k = 1; k <= N + 1; ++k)
        G.breaks[k - 1] = std::log(static_cast<double>(k));
    for (std::size_t i = 0; i < N; ++i)
        G.values[i] = g.a[i] / std::sqrt(G.length(i));
    return G;
}

BesselReport fi_to_ds(const HalfLineFunction& G, std::int64_t n_cap)
{
    BesselReport rep;
    if (G.pieces() == 0)
        return rep;
    if (G.start(0) > 0.0)
        throw DomainError("function must start at or before 0");
    const double end = G.end();
    std::int64_t N = 0;
    if (end >= std::log(2.0)) {
        const double guess = std::exp(std::min(end, 40.0)) - 1.0;
        N = n_cap >= 0 ? std::min<std::int64_t>(n_cap, static_cast<std::int64_t>(guess) + 2)
                       : static_cast<std::int64_t>(guess) + 2;
        if (N > (std::int64_t{1} << 28))
            throw DomainError("Dirichlet truncation too long; pass a cap");
        while (N >= 1 && std::log(static_cast<double>(N + 1)) > end)
            --N;
    }
    rep.g.a.assign(static_cast<std::size_t>(N), cplx{});

    if (G.layout == Layout::log && G.start(0) == 0.0) {
        for (std::int64_t k = 1; k <= N; ++k) {
            const double kk = static_cast<double>(k);
            rep.g.a[static_cast<std::size_t>(k - 1)] =
                G.values[static_cast<std::size_t>(k - 1)] * (2.0 / (std::sqrt(kk + 1) + std::sqrt(kk)));
        }
    } else {
        std::size_t p = 0;
        for (std::int64_t k = 1; k <= N; ++k) {
            const double A = std::log(static_cast<double>(k));
            const double B = std::log(static_cast<double>(k + 1));
            while (p < G.pieces() && G.start(p) + G.length(p) <= A)
                ++p;
            CompensatedSum<cplx> acc;
            for (std::size_t q = p; q < G.pieces() && G.start(q) < B; ++q) {
                const double lo = std::max(A, G.start(q));
                const double hi = std::min(B, G.start(q) + G.length(q));
                if (hi > lo)
                    acc.add(G.values[q] * (2 * std::exp(lo / 2) * std::expm1((hi - lo) / 2)));
            }
            rep.g.a[static_cast<std::size_t>(k - 1)] = acc.value();
        }
    }

    const double top = std::log(static_cast<double>(N + 1));
    CompensatedSum<double> e, nrm;
    for (const auto& b : rep.g.a)
        e.add(std::norm(b));
    for (std::size_t i = 0; i < G.pieces(); ++i) {
        const double lo = std::max(0.0, G.start(i));
        const double hi = std::min(top, G.start(i) + G.length(i));
        if (hi <= lo)
            continue;
        const bool whole = lo == G.start(i) && hi == G.start(i) + G.length(i);
        nrm.add(std::norm(G.values[i]) * (whole ? G.length(i) : hi - lo));
    }
    rep.coeff_energy = e.value();
    rep.norm_squared = nrm.value();
    rep.holds = rep.coeff_energy <= rep.norm_squared * (1 + 1e-12) + 1e-300;
    return rep;
}

cplx fi_partial_integral(const HalfLineFunction& F, double R, double t)
{
    if (F.pieces() == 0)
        return {};
    const double lo = F.start(0);
    const double slack = 1e-12 * std::max(1.0, std::fabs(F.end()));
    if (R < lo || R > F.end() + slack)
        throw DomainError("integration limit outside the breakpoint range");
    return window_integral(F, lo, std::min(R, F.end()), t);
}

DsIndex ds_divergence_index(const std::function<cplx(std::int64_t)>& partial, std::span<const std::int64_t> schedule)
{
    if (schedule.size() < 4)
        throw InsufficientData("log log schedule needs at least 4 points");
    DsIndex d;
    double prev = -INFINITY;
    for (auto n : schedule) {
        if (n < 3)
            throw DomainError("log log schedule points must be at least 3");
        const double ll = std::log(std::log(static_cast<double>(n)));
        if (ll - prev < 0.1 - 1e-12)
            throw InsufficientData("log log schedule spacing below 0.1");
        prev = ll;
        const double a = std::abs(partial(n));
        d.values.push_back(a > 0.0 ? std::log(a) / ll : -INFINITY);
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

DsIndex ds_divergence_index(const DirichletSeries& g, double t, std::span<const std::int64_t> schedule)
{
    std::vector<std::int64_t> sorted(schedule.begin(), schedule.end());
    if (!std::is_sorted(sorted.begin(), sorted.end()))
        throw DomainError("schedule must be ascending");
    std::vector<cplx> sums;
    if (!sorted.empty() && sorted.front() >= 1)
        sums = ds_partial_sums(g, sorted, t);
    std::size_t i = 0;
    return ds_divergence_index([&](std::int64_t) { return sums.at(i++); }, schedule);
}

std::vector<std::int64_t> ds_schedule(std::int64_t n_max)
{
    std::vector<std::int64_t> out;
    double prev = -INFINITY;
    for (std::int64_t n = 4; n <= n_max && n > 0; n *= 2) {
        const double ll = std::log(std::log(static_cast<double>(n)));
        if (ll - prev >= 0.1) {
            out.push_back(n);
            prev = ll;
        }
    }
    return out;
}

BesselReport compose_multifractal_ds(const BlockFunction& f)
{
    std::int64_t ceiling = 0;
    for (const auto& b : f.blocks)
        if (!b.Q.empty())
            ceiling = std::max({ceiling, b.Q.n_min < 0 ? -b.Q.n_min : b.Q.n_min, b.Q.n_max() < 0 ? -b.Q.n_max() : b.Q.n_max()});
    std::vector<cplx> a(static_cast<std::size_t>(ceiling + 1));
    a[0] = f.constant;
    for (const auto& b : f.blocks) {
        const cplx w = b.channel == Channel::real ? cplx{b.weight, 0.0} : cplx{0.0, b.weight};
        for (std::int64_t n = std::max<std::int64_t>(0, b.Q.n_min); n <= b.Q.n_max(); ++n)
            a[static_cast<std::size_t>(n)] += w * b.Q.coeff(n);
    }
    return fi_to_ds(fs_to_fi(a), ceiling);
}

double angle_of_point(double x)
{
    const double t = 2 * pi * (x - std::floor(x));
    return t >= pi ? t - 2 * pi : t;
}

double embedding_check(const DirichletSeries& g, int panels)
{
    if (panels < 1)
        throw DomainError("need at least one quadrature panel");
    const double n2 = g.h2_norm();
    if (n2 == 0.0)
        return NAN;
    const std::int64_t N = g.n_max();
    auto integrand = [&](double t) { return std::norm(ds_partial_sum(g, N, t)); };
    CompensatedSum<double> acc;
    const double h = 1.0 / panels;
    for (int i = 0; i < panels; ++i)
        acc.add(boost::math::quadrature::gauss<double, 20>::integrate(integrand, i * h, (i + 1) * h));
    return acc.value() / (n2 * n2);
}

double bridge_gap(const HalfLineFunction& G, const DirichletSeries& b, std::int64_t n, double R, double t)
{
    return std::abs(fi_partial_integral(G, R, t) - ds_partial_sum(b, n, t));
}

cplx truncated_transform(const HalfLineFunction& G, double R, double tau)
{
    return window_integral(G, -R, R, tau);
}

FiLocalizationReport fi_localization_check(const HalfLineFunction& G, double R, std::span<const double> ts)
{
    if (!(R >= 2.0))
        throw DomainError("localization needs R >= 2");
    FiLocalizationReport rep;
    rep.R = R;
    rep.norm = std::sqrt(G.norm2_squared());
    rep.delta = NAN;
    if (rep.norm == 0.0)
        return rep;
    const double half = 1.0 / (2 * R);
    for (double t : ts) {
        const double at = std::abs(truncated_transform(G, R, t));
        if (at < rep.norm)
            continue;
        ++rep.qualifying;
        auto sq = [&](double tau) { return std::norm(truncated_transform(G, R, tau)); };
        const double l2 = std::sqrt(
            boost::math::quadrature::gauss_kronrod<double, 31>::integrate(sq, t - half, t + half, 8, 1e-12));
        const double r = l2 * std::sqrt(R) * std::log(R) / at;
        rep.delta = std::isnan(rep.delta) ? r : std::min(rep.delta, r);
    }
    return rep;
}

} // namespace mfzoo
