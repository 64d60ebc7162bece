#include <doctest.h>

#include <cmath>
#include <random>

#include "mfzoo/error.hpp"
#include "mfzoo/io.hpp"

using namespace mfzoo;

namespace {

fs::path scratch(const char* name)
{
    const fs::path dir = fs::temp_directory_path() / "mfzoo_test_io";
    fs::create_directories(dir);
    return dir / name;
}

CoefficientField random_field(int J, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> lv;
    for (int j = 0; j <= J; ++j) {
        lv.emplace_back(pow2u(j));
        for (auto& v : lv.back())
            v = uniform01(rng) * std::exp2(-0.3 * j);
    }
    return CoefficientField(J, std::move(lv), {{"origin", "test"}});
}

void same_field(const CoefficientField& a, const CoefficientField& b)
{
    REQUIRE(a.max_depth() == b.max_depth());
    for (int j = 0; j <= a.max_depth(); ++j)
        for (std::uint64_t k = 0; k < pow2u(j); ++k)
            REQUIRE(a.at(j, k) == b.at(j, k));
    CHECK(a.meta() == b.meta());
}

} // namespace

TEST_CASE("field files")
{
    const auto f = random_field(10, 3);
    const auto p = scratch("f.field");
    write_field(p, f);
    CHECK(sniff_format(p) == "mfzoo-field-v1");
    CHECK(fs::file_size(sidecar_path(p)) == 8 * ((2u << 10) - 1));
    same_field(f, read_field(p));

    const auto q = scratch("f.json");
    write_field(q, f, true);
    same_field(f, read_field(q));
    CHECK_THROWS_AS(write_field(q, random_field(13, 1), true), DomainError);

    // truncated sidecar
    const auto bytes = read_file(sidecar_path(p));
    atomic_write(sidecar_path(p), bytes.substr(0, bytes.size() - 4));
    CHECK_THROWS_AS(read_field(p), FormatError);
    CHECK_THROWS_AS(read_field(scratch("missing.field")), IoError);
    atomic_write(scratch("junk"), "not json");
    CHECK_THROWS_AS(read_field(scratch("junk")), FormatError);
    CHECK(sniff_format(scratch("junk")).empty());
}

TEST_CASE("grid, trig and block files")
{
    std::vector<double> v(256);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::sin(0.1 * i) - 0.25;
    const GridFunction g(8, v);
    write_grid(scratch("g.grid"), g);
    const auto g2 = read_grid(scratch("g.grid"));
    CHECK(g2.depth == 8);
    CHECK(g2.values == g.values);

    TrigPolynomial t;
    t.n_min = -3;
    t.real = true;
    t.coeffs = {{0.5, -0.25}, {0, 0}, {1e-300, 2}, {3, 0}, {1e-300, -2}, {0, 0}, {0.5, 0.25}};
    write_trig(scratch("t.trig"), t);
    const auto t2 = read_trig(scratch("t.trig"));
    CHECK(t2.n_min == -3);
    CHECK(t2.real);
    CHECK(t2.coeffs == t.coeffs);

    BlockFunction bf;
    bf.schedule = SparseSchedule{}.shifted(1);
    bf.constant = {0.25, -0.5};
    bf.blocks.push_back({2, 0.25, Channel::real, t});
    bf.blocks.push_back({3, 0.0625, Channel::imaginary, TrigPolynomial::monomial(5, 2.0)});
    write_block_function(scratch("b.blocks"), bf);
    const auto b2 = read_block_function(scratch("b.blocks"));
    CHECK(b2.schedule.m(2) == bf.schedule.m(2));
    CHECK(b2.constant == bf.constant);
    REQUIRE(b2.blocks.size() == 2);
    CHECK(b2.blocks[1].channel == Channel::imaginary);
    CHECK(b2.blocks[1].weight == 0.0625);
    CHECK(b2.blocks[0].Q.coeffs == t.coeffs);
    for (double x : {0.1, 0.37})
        CHECK(b2(x) == bf(x));

    BlockFunction ex;
    ex.schedule = SparseSchedule({4, 9, 20});
    write_block_function(scratch("e.blocks"), ex);
    CHECK(read_block_function(scratch("e.blocks")).schedule.m(3) == 20);
}

TEST_CASE("dirichlet and half-line files")
{
    DirichletSeries g;
    for (int k = 1; k <= 100; ++k)
        g.a.push_back({1.0 / k, -std::sqrt(k)});
    write_ds(scratch("g.ds"), g);
    CHECK(read_ds(scratch("g.ds")).a == g.a);

    const auto G = ds_to_fi(g);
    write_halfline(scratch("G.hl"), G);
    const auto G2 = read_halfline(scratch("G.hl"));
    CHECK(G2.layout == Layout::log);
    CHECK(G2.breaks == G.breaks);
    CHECK(G2.values == G.values);
    CHECK(G2.norm2_squared() == G.norm2_squared());

    const auto H = HalfLineFunction::general({-1.0, 0.5, 2.0}, {{1, 2}, {3, 4}});
    write_halfline(scratch("H.hl"), H);
    const auto H2 = read_halfline(scratch("H.hl"));
    CHECK(H2.layout == Layout::general);
    CHECK(H2.values == H.values);
}

TEST_CASE("spectrum csv")
{
    SpectrumReport r;
    r.rows.push_back({0.1, 0.2000000000000001, 0.99, 12, {}, "ok", NAN});
    r.rows.push_back({0.15, NAN, NAN, 2, {}, "insufficient", NAN});
    const auto back = read_spectrum_csv(r.to_csv());
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].dimension == r.rows[0].dimension);
    CHECK(back.rows[0].levels_used == 12);
    CHECK(std::isnan(back.rows[1].dimension));
    CHECK(back.rows[1].flag == "insufficient");
    CHECK(back.to_csv() == r.to_csv());
    CHECK_THROWS_AS(read_spectrum_csv("a,b\n"), FormatError);
}
