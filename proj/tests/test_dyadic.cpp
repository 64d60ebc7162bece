#include <doctest.h>

#include <cmath>
#include <random>

#include "mfzoo/dyadic.hpp"
#include "mfzoo/error.hpp"
#include "mfzoo/haar.hpp"
#include "mfzoo/numeric.hpp"

using namespace mfzoo;

namespace {

// Field whose level-j entries all equal g(j).
CoefficientField level_field(int J, double (*g)(int))
{
    std::vector<std::vector<double>> lv(J + 1);
    for (int j = 0; j <= J; ++j)
        lv[j].assign(pow2u(j), g(j));
    return CoefficientField(J, lv);
}

std::vector<double> chain_of(int J, const std::function<double(int)>& g)
{
    std::vector<double> c(J + 1);
    for (int j = 0; j <= J; ++j)
        c[j] = g(j);
    return c;
}

CoefficientField random_field(int J, std::uint64_t seed, double zero_prob = 0.0)
{
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> lv(J + 1);
    for (int j = 0; j <= J; ++j) {
        lv[j].resize(pow2u(j));
        for (auto& v : lv[j])
            v = uniform01(rng) < zero_prob ? 0.0 : std::exp2(-j * (0.1 + 0.8 * uniform01(rng)));
    }
    return CoefficientField(J, lv);
}

// Oracle: membership of one cube decided from its own chain.
bool oracle_member(const CoefficientField& f, int j, std::uint64_t k, double a, double eps, LevelMode mode)
{
    auto ratio = [&](int i) {
        const double e = f.at(i, k >> (j - i));
        if (e == 0.0)
            return 10.0;
        return std::min(10.0, std::log2(e) / -static_cast<double>(i));
    };
    if (mode == LevelMode::limit)
        return std::fabs(ratio(j) - a) <= eps;
    const int len = static_cast<int>(std::ceil(j / 2.0));
    double lo = 1e300, hi = -1e300;
    for (int i = j - len + 1; i <= j; ++i) {
        lo = std::min(lo, ratio(i));
        hi = std::max(hi, ratio(i));
    }
    return (mode == LevelMode::lower ? lo : hi) <= a + eps;
}

} // namespace

TEST_CASE("cube_of_point")
{
    CHECK(cube_of_point(0.3, 2) == DyadicCube{2, 1});
    CHECK(cube_of_point(0.3, 2).left() == 0.25);
    CHECK(cube_of_point(0.3, 2).right() == 0.5);
    CHECK(cube_of_point(0.0, 5) == DyadicCube{5, 0});
    CHECK(cube_of_point(0.999, 3) == DyadicCube{3, 7});
    CHECK_THROWS_AS(cube_of_point(1.0, 3), DomainError);
    CHECK_THROWS_AS(cube_of_point(-0.1, 3), DomainError);
    CHECK_THROWS_AS(cube_of_point(0.5, -1), DomainError);

    const DyadicCube c{3, 5};
    CHECK(c.parent() == DyadicCube{2, 2});
    CHECK(c.enlarged() == std::pair{4.0 / 8, 7.0 / 8});
    CHECK(DyadicCube{3, 0}.enlarged() == std::pair{0.0, 2.0 / 8});
    CHECK(DyadicCube{3, 7}.enlarged() == std::pair{6.0 / 8, 1.0});
}

TEST_CASE("cube_of_point contains the point")
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 2000; ++t) {
        const double x = uniform01(rng);
        const int j = static_cast<int>(rng() % 40);
        const auto c = cube_of_point(x, j);
        CHECK(c.contains(x));
        CHECK(c.index == static_cast<std::uint64_t>(std::floor(x * std::exp2(j))));
    }
}

TEST_CASE("field ingestion")
{
    CoefficientField f(1, {{-2.0}, {0.5, -0.25}});
    CHECK(f.at(0, 0) == 2.0);
    CHECK(f.at(1, 1) == 0.25);
    CHECK_THROWS_AS(CoefficientField(1, {{1.0}, {1.0}}), DomainError);
    CHECK_THROWS_AS(CoefficientField(1, {{1.0}, {NAN, 1.0}}), DomainError);
}

TEST_CASE("estimate_exponents examples")
{
    SUBCASE("exact power law")
    {
        const auto c = chain_of(20, [](int j) { return std::exp2(-0.3 * j); });
        const auto e = estimate_exponents(c, {1, 20});
        CHECK(e.lower == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(e.upper == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(e.tail_begin == 11);
    }
    SUBCASE("alternating slopes")
    {
        const auto c = chain_of(20, [](int j) { return std::exp2((j % 2 == 0 ? -0.2 : -0.6) * j); });
        const auto e = estimate_exponents(c, {1, 20});
        CHECK(e.lower == doctest::Approx(0.2).epsilon(1e-14));
        CHECK(e.upper == doctest::Approx(0.6).epsilon(1e-14));
    }
    SUBCASE("log-perturbed power law at depth 48")
    {
        // Oracle: ratio_j = 0.4 - 2 log2(j)/j, tail levels 25..48.
        const auto c = chain_of(48, [](int j) { return double(j) * j * std::exp2(-0.4 * j); });
        const auto e = estimate_exponents(c, {1, 48});
        CHECK(e.tail_begin == 25);
        CHECK(e.lower == doctest::Approx(0.028491504818022095).epsilon(1e-12));
        CHECK(e.upper == doctest::Approx(0.1672932291366185).epsilon(1e-12));
    }
    SUBCASE("zero tail is flagged and clamped")
    {
        const auto c = chain_of(10, [](int j) { return j < 6 ? 1.0 : 0.0; });
        const auto e = estimate_exponents(c, {1, 10});
        CHECK(e.all_zero_tail);
        CHECK(e.lower == 10.0);
        CHECK(e.upper == 10.0);
    }
    SUBCASE("window validation")
    {
        const auto c = chain_of(10, [](int) { return 1.0; });
        CHECK_THROWS_AS(estimate_exponents(c, {0, 10}), DomainError);
        CHECK_THROWS_AS(estimate_exponents(c, {1, 11}), DomainError);
    }
    SUBCASE("field path equals chain path")
    {
        const auto f = level_field(12, [](int j) { return std::exp2(-0.35 * j); });
        const auto a = estimate_exponents(f, 0.77, {1, 12});
        const auto b = estimate_exponents(f.chain(0.77), {1, 12});
        CHECK(a.lower == b.lower);
        CHECK(a.upper == b.upper);
    }
}

TEST_CASE("estimate_exponents invariants on random fields")
{
    const auto f = random_field(10, 5, 0.05);
    std::mt19937_64 rng(6);
    for (int t = 0; t < 300; ++t) {
        const double x = uniform01(rng);
        const int jmin = 1 + static_cast<int>(rng() % 5);
        const Window w{jmin, 10};
        const auto e = estimate_exponents(f, x, w);
        CHECK(e.lower <= e.upper);

        const auto same = estimate_exponents(f.scaled(1.0), x, w);
        CHECK(same.lower == e.lower);
        CHECK(same.upper == e.upper);

        const double c = 0.3 + 5.0 * uniform01(rng);
        const auto s = estimate_exponents(f.scaled(c), x, w);
        const double bound = std::fabs(std::log2(c)) / jmin + 1e-12;
        if (!e.all_zero_tail) {
            CHECK(std::fabs(s.lower - e.lower) <= bound);
            CHECK(std::fabs(s.upper - e.upper) <= bound);
        }
    }
}

TEST_CASE("gf1_check")
{
    SUBCASE("flat field at p")
    {
        for (double p : {1.0, 2.0, 3.5}) {
            std::vector<std::vector<double>> lv(9);
            for (int j = 0; j <= 8; ++j)
                lv[j].assign(pow2u(j), std::pow(2.0, -j / p));
            const auto rep = gf1_check(CoefficientField(8, lv), p, 1.0);
            for (double n : rep.norms)
                CHECK(n == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(rep.all_pass);
        }
    }
    SUBCASE("zero field")
    {
        const auto rep = gf1_check(CoefficientField::zeros(6), 2.0, 0.0);
        for (double n : rep.norms)
            CHECK(n == 0.0);
    }
    SUBCASE("indicator of the left half")
    {
        GridFunction f(6, std::vector<double>(64, 0.0));
        std::fill_n(f.values.begin(), 32, 1.0);
        const auto rep = gf1_check(haar_field(f), 2.0, std::sqrt(f.norm2_squared()));
        CHECK(rep.norms[0] == doctest::Approx(0.5).epsilon(1e-15));
        for (int j = 1; j <= 6; ++j)
            CHECK(rep.norms[j] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
        CHECK(rep.all_pass);
    }
    CHECK_THROWS_AS(gf1_check(CoefficientField::zeros(2), 0.5, 1.0), DomainError);
}

TEST_CASE("extract_level_set examples")
{
    const auto f = level_field(12, [](int j) { return std::exp2(-0.3 * j); });
    for (auto mode : {LevelMode::limit, LevelMode::lower, LevelMode::upper}) {
        const auto g = extract_level_set(f, 0.3, 0.01, mode);
        for (int j = 1; j <= 12; ++j)
            CHECK(g.count(j) == pow2u(j));
    }
    const auto far = extract_level_set(f, 0.3 + 10 * 0.01, 0.01, LevelMode::limit);
    for (int j = 1; j <= 12; ++j)
        CHECK(far.count(j) == 0);
    CHECK_THROWS_AS(extract_level_set(f, 0.3, 0.0, LevelMode::limit), DomainError);
}

TEST_CASE("extract_level_set matches the per-cube oracle")
{
    const auto f = random_field(9, 21, 0.02);
    for (auto mode : {LevelMode::limit, LevelMode::lower, LevelMode::upper}) {
        for (double a : {0.2, 0.45, 0.7}) {
            const auto g = extract_level_set(f, a, 0.05, mode);
            for (int j = 1; j <= 9; ++j) {
                std::vector<std::uint64_t> want;
                for (std::uint64_t k = 0; k < pow2u(j); ++k)
                    if (oracle_member(f, j, k, a, 0.05, mode))
                        want.push_back(k);
                CHECK(g.cubes[j] == want);
            }
        }
    }
}

TEST_CASE("extract_level_set is monotone in eps")
{
    const auto f = random_field(9, 8, 0.02);
    for (auto mode : {LevelMode::limit, LevelMode::lower, LevelMode::upper}) {
        const double eps[] = {0.005, 0.02, 0.05, 0.2};
        for (int i = 0; i + 1 < 4; ++i) {
            const auto a = extract_level_set(f, 0.5, eps[i], mode);
            const auto b = extract_level_set(f, 0.5, eps[i + 1], mode);
            CHECK(grid_subset(a, b));
            for (int j = 1; j <= 9; ++j)
                CHECK(a.count(j) <= b.count(j));
        }
    }
}

TEST_CASE("box_dimension examples")
{
    const auto full = full_grid(16);
    const auto bd = box_dimension(full);
    CHECK(bd.dimension == 1.0);
    CHECK(bd.r2 == 1.0);

    LevelSetGrid chain;
    chain.max_depth = 16;
    chain.cubes.resize(17);
    for (int j = 0; j <= 16; ++j)
        chain.cubes[j] = {pow2u(j) / 3};
    CHECK(box_dimension(chain).dimension == 0.0);

    // Indices whose binary digits vanish at even positions (from the top).
    LevelSetGrid even;
    even.max_depth = 20;
    even.cubes.resize(21);
    even.cubes[0] = {0};
    for (int j = 1; j <= 20; ++j)
        for (auto k : even.cubes[j - 1]) {
            even.cubes[j].push_back(2 * k);
            if (j % 2 == 1)
                even.cubes[j].push_back(2 * k + 1);
        }
    for (int j = 1; j <= 20; ++j)
        CHECK(even.count(j) == pow2u((j + 1) / 2));
    const auto be = box_dimension(even);
    // Oracle: least-squares slope of ceil(j/2) on j = 1..20.
    CHECK(be.dimension == doctest::Approx(0.4962406015037595).epsilon(1e-13));
    CHECK(std::fabs(be.dimension - 0.5) <= 0.05);

    LevelSetGrid sparse;
    sparse.max_depth = 10;
    sparse.cubes.resize(11);
    sparse.cubes[2] = {0};
    sparse.cubes[5] = {1};
    sparse.cubes[7] = {3};
    CHECK_THROWS_AS(box_dimension(sparse), InsufficientData);
}

TEST_CASE("box_dimension of a union dominates its parts")
{
    // Exact-count grids with slopes 0.25 and 0.75 on levels 1..16.
    auto make = [](double s, std::uint64_t offset) {
        LevelSetGrid g;
        g.max_depth = 16;
        g.cubes.resize(17);
        for (int j = 1; j <= 16; ++j) {
            const auto n = static_cast<std::uint64_t>(std::llround(std::exp2(s * j)));
            for (std::uint64_t k = 0; k < n; ++k)
                g.cubes[j].push_back((k + offset) % pow2u(j));
            std::sort(g.cubes[j].begin(), g.cubes[j].end());
            g.cubes[j].erase(std::unique(g.cubes[j].begin(), g.cubes[j].end()), g.cubes[j].end());
        }
        return g;
    };
    const auto a = make(0.25, 0), b = make(0.75, 7);
    const double da = box_dimension(a).dimension, db = box_dimension(b).dimension;
    const double du = box_dimension(grid_union(a, b)).dimension;
    CHECK(du >= std::max(da, db) - 0.02);
}

TEST_CASE("coarse_spectrum examples")
{
    const auto f = level_field(12, [](int j) { return std::exp2(-0.3 * j); });
    const std::vector<double> ab{0.1, 0.3, 0.5};
    SpectrumOptions o;
    o.eps = 0.01;
    o.mode = LevelMode::limit;
    o.model = [](double a) { return 2 * a; };
    const auto rep = coarse_spectrum(f, ab, o);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].flag == "insufficient");
    CHECK(rep.rows[1].dimension == 1.0);
    CHECK(rep.rows[1].flag == "ok");
    CHECK(rep.rows[1].model == 0.6);
    CHECK(rep.rows[2].flag == "insufficient");

    const auto z = coarse_spectrum(CoefficientField::zeros(10), ab, o);
    for (const auto& r : z.rows)
        CHECK(r.flag == "insufficient");

    const auto csv = rep.to_csv();
    CHECK(csv.rfind("abscissa,dim_estimate,r2,levels_used,flag\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const std::vector<double> bad{-0.1};
    CHECK_THROWS_AS(coarse_spectrum(f, bad, o), DomainError);
}

TEST_CASE("coarse_spectrum is deterministic")
{
    const auto f = random_field(10, 99, 0.01);
    std::vector<double> ab;
    for (int i = 1; i <= 10; ++i)
        ab.push_back(0.1 * i);
    SpectrumOptions o;
    o.eps = 0.05;
    set_max_threads(4);
    const auto a = coarse_spectrum(f, ab, o).to_csv();
    set_max_threads(1);
    const auto b = coarse_spectrum(f, ab, o).to_csv();
    CHECK(a == b);
}
