#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfzoo/error.hpp"
#include "mfzoo/fourier.hpp"

using namespace mfzoo;
using std::numbers::pi;

namespace {

std::vector<double> k_points(int count, std::uint64_t seed)
{
    std::vector<double> xs;
    for (int i = 0; i < count; ++i)
        xs.push_back(sample_point(k_rule(fourier_point_schedule()), 64, seed + i).value());
    return xs;
}

double grid_norm_p(std::span<const cplx> v, double p)
{
    std::vector<double> a;
    for (const auto& z : v)
        a.push_back(std::pow(std::abs(z), p));
    return std::pow(compensated_sum(a) / static_cast<double>(v.size()), 1.0 / p);
}

double grid_norm_p(std::span<const double> v, double p)
{
    std::vector<double> a;
    for (double z : v)
        a.push_back(std::pow(std::fabs(z), p));
    return std::pow(compensated_sum(a) / static_cast<double>(v.size()), 1.0 / p);
}

} // namespace

TEST_CASE("trig polynomial evaluation")
{
    TrigPolynomial t;
    t.n_min = -2;
    t.coeffs = {0.5, {0.0, 1.0}, 2.0, {0.0, -1.0}, 0.5};
    t.real = true;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        const double x = uniform01(rng);
        // c(1) = -i, c(-1) = i: 2 sin(2πx)
        CHECK(t(x).real() == doctest::Approx(2 + 2 * std::sin(2 * pi * x) + std::cos(4 * pi * x)).epsilon(1e-14));
        CHECK(t.partial(0, x).real() == 2.0);
        CHECK(t.partial(1, x).real() == doctest::Approx(2 + 2 * std::sin(2 * pi * x)).epsilon(1e-14));
    }
    const auto g = t.grid_values(16);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(g[i].real() == doctest::Approx(t(i / 16.0).real()).epsilon(1e-13));
    CHECK(t.band() == std::pair<std::int64_t, std::int64_t>{0, 2});
    CHECK(t.norm2_squared() == doctest::Approx(6.5));

    // Phase recurrence against direct evaluation at high frequency.
    TrigPolynomial h;
    h.n_min = 90000;
    for (int n = 0; n < 2000; ++n)
        h.coeffs.push_back(cplx(uniform01(rng), uniform01(rng)));
    const double x = 0.123456789;
    cplx direct{};
    for (int n = 0; n < 2000; ++n)
        direct += h.coeffs[n] * std::polar(1.0, 2 * pi * std::fmod((90000.0 + n) * x, 1.0));
    CHECK(std::abs(h(x) - direct) <= 1e-9);
}

TEST_CASE("build_chi")
{
    const auto c = build_chi({0}, 3);
    CHECK(c(0.125 + 0.0625) == 0.5);
    CHECK(c(0.0) == 1.0);
    CHECK(c(0.06) == 1.0);
    CHECK(c(0.125) == 1.0);
    CHECK(c(0.5) == 0.0);
    CHECK(c(1.0 - 0.0625) == 0.5);
    CHECK(c.norm_p_power(1.0) == doctest::Approx(0.25).epsilon(1e-15));
    // Midpoint rule is exact on the linear pieces.
    const auto s = c.samples(1 << 14);
    std::vector<double> mid;
    for (int i = 0; i < (1 << 14); ++i)
        mid.push_back(c((i + 0.5) / (1 << 14)));
    CHECK(compensated_sum(mid) / (1 << 14) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK_THROWS_AS(build_chi({}, 3), DomainError);

    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const int scale = 3 + static_cast<int>(rng() % 6);
        std::vector<std::uint64_t> cov;
        for (int i = 0; i < 1 + static_cast<int>(rng() % 8); ++i)
            cov.push_back(rng() % pow2u(scale));
        const auto chi = build_chi(cov, scale);
        for (double p : {1.0, 2.0, 3.0}) {
            const double np = chi.norm_p_power(p);
            CHECK(np <= 3.0 * chi.intervals.size() * std::ldexp(1.0, -scale) + 1e-15);
            std::vector<double> mp;
            for (int i = 0; i < (1 << 14); ++i)
                mp.push_back(std::pow(chi((i + 0.5) / (1 << 14)), p));
            CHECK(compensated_sum(mp) / (1 << 14) == doctest::Approx(np).epsilon(1e-4));
        }
        for (double v : chi.samples(1024)) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("fejer_approx")
{
    const std::vector<double> one(64, 1.0);
    const auto f1 = fejer_approx(one, 16);
    CHECK(f1(0.3).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f1.band() == std::pair<std::int64_t, std::int64_t>{0, 0});

    std::vector<cplx> e(64);
    for (int i = 0; i < 64; ++i)
        e[i] = std::polar(1.0, 2 * pi * i / 64.0);
    const auto fe = fejer_approx(std::span<const cplx>(e), 8);
    CHECK(std::abs(fe.coeff(1) - cplx(1.0 - 1.0 / 9, 0.0)) <= 1e-15);
    for (std::int64_t n = -8; n <= 8; ++n)
        if (n != 1)
            CHECK(std::abs(fe.coeff(n)) <= 1e-16);

    CHECK_THROWS_AS(fejer_approx(one, 17), DomainError);
    CHECK_THROWS_AS(fejer_approx(std::vector<double>(48, 1.0), 4), DomainError);

    const int m = 7;
    const auto chi = build_chi({3, 4, 40}, m - 1);
    const std::size_t G = pow2u(m + 2);
    const auto g = chi.samples(G);
    const auto P = fejer_approx(g, std::int64_t{1} << (m - 1));
    const auto dense = P.grid_values(G * 8);
    double mn = INFINITY;
    for (const auto& v : dense)
        mn = std::min(mn, v.real());
    CHECK(mn >= -1e-9);
    for (auto k : chi.intervals)
        CHECK(P((k + 0.5) * std::ldexp(1.0, -(m - 1))).real() >= 0.25);
    for (double p : {1.0, 2.0})
        CHECK(grid_norm_p(dense, p) <= grid_norm_p(chi.samples(G * 8), p) * (1 + 1e-3));
}

TEST_CASE("build_Q")
{
    const auto one = TrigPolynomial::constant(1.0);
    const auto Q = build_Q(one, 4);
    CHECK(Q((0.25) / 16).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(Q.band() == std::pair<std::int64_t, std::int64_t>{16, 16});
    CHECK(std::abs(Q.coeff(16)) == doctest::Approx(0.5).epsilon(1e-15));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const double x = uniform01(rng);
        CHECK(Q(x).real() == doctest::Approx(std::sin(32 * pi * x)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(build_Q(TrigPolynomial::monomial(9, 1.0), 4), StageError);

    // Chi pipeline at m = 4, evaluated on K-points.
    const int m = 4;
    const auto chi = build_chi({0, 1, 2, 3, 4, 5, 6, 7}, m - 1);
    const auto P = fejer_approx(chi.samples(pow2u(m + 2)), 8);
    const auto QP = build_Q(P, m);
    for (double x : k_points(1000, 100)) {
        const double p = P(x).real();
        CHECK(QP(x).real() >= std::sqrt(0.5) * p - 1e-9);
    }
}

TEST_CASE("block functions")
{
    SUBCASE("empty range")
    {
        BlockBuildOptions o;
        o.k_min = 3;
        o.k_max = 2;
        const auto b = build_block_function([](int, int) { return std::vector<std::uint64_t>{0}; }, o);
        CHECK(b.f.blocks.empty());
        CHECK(b.f(0.3) == cplx{});
    }
    SUBCASE("single block at k = 2")
    {
        BlockBuildOptions o;
        o.k_min = 2;
        o.k_max = 2;
        const auto b = build_block_function([](int, int) { return std::vector<std::uint64_t>{17}; }, o);
        REQUIRE(b.f.blocks.size() == 1);
        CHECK(b.f.blocks[0].channel == Channel::real);
        CHECK(b.f.M(2) == 256);
        CHECK(b.f.N(2) == 768);
        const auto [lo, hi] = b.f.blocks[0].Q.band();
        CHECK(lo >= 256);
        CHECK(hi <= 768);
    }
    SUBCASE("covers from an F_0.5 sample")
    {
        std::vector<double> pts;
        for (int i = 0; i < 1000; ++i)
            pts.push_back(sample_point(f_alpha_rule(0.5, fourier_point_schedule()), 64, 5000 + i).value());
        BlockBuildOptions o;
        o.s = 0.55;
        const auto b = build_block_function(pts, o);
        const auto& f = b.f;
        REQUIRE(f.blocks.size() == 2);
        CHECK(f.blocks[1].channel == Channel::imaginary);
        for (const auto& d : b.diagnostics) {
            CHECK(d.fejer_min >= -1e-9);
            CHECK(d.c_measured >= 0.25);
        }
        // Q >= (√2/2) P >= (√2/2) c gauge on covered points.
        const auto& d = b.diagnostics[0];
        int positive = 0;
        for (double x : pts) {
            const double re = f.partial_sum(f.N(2), x).real();
            CHECK(re >= -1e-9);
            positive += re >= f.blocks[0].weight * std::sqrt(0.5) * d.c_measured * d.gauge * (1 - 1e-12);
        }
        MESSAGE("points above the block lower bound: " << positive << " of " << pts.size());
        CHECK(positive > 900);

        // Partial sums.
        const double x = pts[0];
        CHECK(f.partial_sum(f.M(2) - 1, x) == cplx{});
        CHECK(f.partial_sum(f.N(3), x) == f(x));
        CHECK(f.partial_sum(f.N(3) + 1000, x) == f(x));
        const double base = f.partial_sum(f.N(2), x).real();
        for (std::int64_t n : {f.N(2), f.N(2) + 1, f.M(3), f.N(3), (std::int64_t{1} << 24) - 1})
            CHECK(std::fabs(f.partial_sum(n, x).real() - base) <= 1e-12);

        // Parseval against a dense grid.
        const std::size_t G = pow2u(18);
        std::vector<double> sq(G);
        const auto r = f.blocks[0].Q.grid_values(G);
        const auto im = f.blocks[1].Q.grid_values(G);
        for (std::size_t i = 0; i < G; ++i)
            sq[i] = std::norm(f.blocks[0].weight * r[i] + cplx(0, f.blocks[1].weight) * im[i]);
        CHECK(compensated_sum(sq) / G == doctest::Approx(f.norm2_squared()).epsilon(1e-12));

        CHECK_NOTHROW(f.validate());
        auto bad = f;
        bad.blocks[1].k = 2;
        CHECK_THROWS_AS(bad.validate(), StageError);
    }
}

TEST_CASE("positivity on K for the family")
{
    FourierFamilyOptions o;
    o.alphas = {1.0, 0.3, 0.5, 0.7};
    o.samples_per_alpha = 300;
    const auto fam = build_fourier_family(o);
    const auto& f = fam.f;
    CHECK_NOTHROW(f.validate());
    for (double x : k_points(300, 77)) {
        CHECK(f.partial_sum(f.N(2), x).real() >= -1e-9);
        CHECK(f.partial_sum(f.N(3), x).imag() >= -1e-9);
    }
    CHECK(fam.members.size() == 4);
    CHECK(f.constant == cplx(1.0, 1.0) / std::sqrt(2.0));
}

TEST_CASE("fs_divergence_index")
{
    const auto c = TrigPolynomial::constant(1.0);
    const std::vector<std::int64_t> ns{24, 768, 98304};
    const auto d0 = fs_divergence_index([&](std::int64_t n) { return c.partial(n, 0.3); }, ns);
    CHECK(d0.beta_minus == 0.0);
    CHECK(d0.beta_plus == 0.0);

    // Ladder with |S_{N_q}(0)| = N_q^{1/4}.
    TrigPolynomial lad;
    lad.n_min = 0;
    lad.coeffs.assign(98305, cplx{});
    double prev = 0.0;
    for (auto n : ns) {
        lad.coeffs[n] = std::pow(double(n), 0.25) - prev;
        prev = std::pow(double(n), 0.25);
    }
    const auto dl = fs_divergence_index([&](std::int64_t n) { return lad.partial(n, 0.0); }, ns);
    CHECK(dl.beta_minus == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(dl.beta_plus == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(dl.tail_begin == 1);

    const std::vector<std::int64_t> two{24, 768};
    CHECK_THROWS_AS(fs_divergence_index([&](std::int64_t n) { return c.partial(n, 0.3); }, two), InsufficientData);
}

TEST_CASE("localization_check")
{
    const std::vector<double> xs{0.0, 0.1, 0.37, 0.9};
    for (double p : {1.0, 2.0}) {
        const auto r = localization_check(TrigPolynomial::constant(1.0), 6, p, xs);
        CHECK(r.qualifying == xs.size());
        CHECK(r.delta == doctest::Approx(std::pow(3.0, 1 / p) * std::pow(6.0, 3 / p)).epsilon(1e-12));
    }

    const int j = 7;
    TrigPolynomial D;
    D.n_min = -(1 << j);
    D.coeffs.assign(2 * (1 << j) + 1, 1.0);
    D.real = true;
    const std::vector<double> zero{0.0};
    const auto rd = localization_check(D, j, 2.0, zero);
    CHECK(rd.qualifying == 1);
    CHECK(rd.delta > 0.0);
    CHECK(std::isfinite(rd.delta));

    const auto none = localization_check(TrigPolynomial::monomial(3, 0.0), 5, 2.0, zero);
    CHECK(none.qualifying == 0);
    CHECK(std::isnan(none.delta));
}
