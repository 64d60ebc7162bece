#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mfzoo/dirichlet.hpp"
#include "mfzoo/error.hpp"
#include "mfzoo/fourier.hpp"
#include "mfzoo/fractal_sets.hpp"
#include "mfzoo/haar.hpp"
#include "mfzoo/poisson.hpp"

namespace mfzoo::cli {

using nlohmann::json;

namespace {

// value <= limit passes
Check at_most(std::string name, double value, double limit)
{
    return {std::move(name), value, limit, value <= limit};
}

Check at_least(std::string name, double value, double limit)
{
    return {std::move(name), value, limit, value >= limit};
}

DirichletSeries random_series(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd;
    DirichletSeries g;
    for (std::size_t k = 0; k < n; ++k)
        g.a.push_back({nd(rng), nd(rng)});
    return g;
}

SuiteResult dirichlet_bridges(std::uint64_t seed)
{
    SuiteResult r;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;

    double norm_ds = 0.0, norm_fs = 0.0, ident = 0.0, bessel = 0.0, c_ds = 0.0, c_fi = 0.0, emb = 0.0, cs = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 200 + 400 * trial;
        const auto g = random_series(n, rng);
        const double ng = g.h2_norm();
        const auto G = ds_to_fi(g);
        norm_ds = std::max(norm_ds, std::fabs(std::sqrt(G.norm2_squared()) - ng) / ng);

        const auto back = fi_to_ds(G);
        bessel = std::max(bessel, back.coeff_energy / back.norm_squared);
        const double nG = std::sqrt(G.norm2_squared());
        std::vector<std::int64_t> ns;
        for (std::int64_t m = 1; m <= static_cast<std::int64_t>(n); m *= 3)
            ns.push_back(m);
        ns.push_back(static_cast<std::int64_t>(n));
        for (double t : {-10.0, -3.7, 0.0, 1.1, 10.0}) {
            const auto sums = ds_partial_sums(g, ns, t);
            double H = 0.0, head = 0.0;
            std::int64_t k = 0;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                for (; k < ns[i]; ++k) {
                    H += 1.0 / static_cast<double>(k + 1);
                    head += std::norm(g.a[static_cast<std::size_t>(k)]);
                }
                cs = std::max(cs, std::abs(sums[i]) / (std::sqrt(H * head)));
                const double R = std::log(static_cast<double>(ns[i])) + 0.5 * std::log1p(1.0 / static_cast<double>(ns[i]));
                c_ds = std::max(c_ds, bridge_gap(G, g, ns[i], R, t) / ((1 + std::fabs(t)) * ng));
                c_fi = std::max(c_fi, bridge_gap(G, back.g, ns[i], R, t) / ((1 + std::fabs(t)) * nG));
            }
        }

        std::vector<cplx> a(n);
        for (auto& c : a)
            c = {nd(rng), nd(rng)};
        const auto F = fs_to_fi(a);
        double e = 0.0;
        for (const auto& c : a)
            e += std::norm(c);
        norm_fs = std::max(norm_fs, std::fabs(F.norm2_squared() - e) / e);
        const std::int64_t m = static_cast<std::int64_t>(n) / 2;
        for (double t : {-2.0, 0.9}) {
            cplx S;
            for (std::int64_t q = 0; q <= m; ++q)
                S += a[static_cast<std::size_t>(q)] * std::polar(1.0, t * static_cast<double>(q));
            const cplx want = S * (std::polar(1.0, t) - 1.0) / cplx{0.0, t};
            ident = std::max(ident, std::abs(fi_partial_integral(F, static_cast<double>(m + 1), t) - want) /
                                        std::sqrt(e * static_cast<double>(m + 1)));
        }
        bessel = std::max(bessel, [&] {
            const auto b = fi_to_ds(F, 2000);
            return b.coeff_energy / b.norm_squared;
        }());
    }
    for (int trial = 0; trial < 10; ++trial)
        emb = std::max(emb, embedding_check(random_series(100, rng)));

    r.checks.push_back(at_most("ds_to_fi norm identity (relative)", norm_ds, 1e-12));
    r.checks.push_back(at_most("fs_to_fi norm identity (relative)", norm_fs, 1e-12));
    r.checks.push_back(at_most("unit-grid integral identity at R = n + 1", ident, 1e-10));
    r.checks.push_back(at_most("Bessel ratio", bessel, 1.0 + 1e-12));
    r.checks.push_back(at_most("Cauchy-Schwarz ratio", cs, 1.0 + 1e-12));
    r.checks.push_back(at_most("bridge constant, series to integral", c_ds, 10.0));
    r.checks.push_back(at_most("bridge constant, integral to series", c_fi, 10.0));
    r.checks.push_back(at_most("embedding ratio", emb, 10.0));
    return r;
}

SuiteResult haar_gf(std::uint64_t seed)
{
    SuiteResult r;
    std::mt19937_64 rng(seed);
    const std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5};
    const auto f = build_saturating(alphas, 12);
    const auto field = haar_field(f);
    const auto rep = gf1_check(field, 2.0, std::sqrt(f.norm2_squared()));
    r.checks.push_back(at_least("GF1 levels passing", rep.all_pass ? 1.0 : 0.0, 1.0));

    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const int j = 4 + trial;
        std::vector<double> a(pow2u(j));
        for (auto& v : a)
            v = uniform01(rng) * std::exp2(-0.5 * j);
        const auto g = gf2_build_haar(j, a, j + 2);
        const auto fl = haar_field(g);
        double sq = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            worst = std::max(worst, std::fabs(fl.at(j, k) - a[k]) / std::max(a[k], 1e-300));
            sq += a[k] * a[k];
        }
        worst = std::max(worst, std::fabs(g.norm2_squared() - sq) / sq);
    }
    r.checks.push_back(at_most("GF2 build consistency (relative)", worst, 1e-12));
    return r;
}

SuiteResult poisson_kernel(std::uint64_t seed)
{
    SuiteResult r;
    double mass = 0.0;
    for (int j = 1; j <= 12; ++j) {
        const double rr = 1.0 - std::exp2(-j);
        const std::size_t M = pow2u(j + 4);
        const auto w = kernel_weights(rr, M);
        mass = std::max(mass, std::fabs(compensated_sum(w) - 1.0));
    }
    r.checks.push_back(at_most("kernel unit mass", mass, 1e-8));

    std::mt19937_64 rng(seed);
    std::vector<double> v(pow2u(10));
    for (auto& x : v)
        x = uniform01(rng);
    const auto f = CircleFunction::from_grid(GridFunction(10, v));
    const auto pf = poisson_field(f, 10);
    double excess = -INFINITY;
    const double n1 = GridFunction(10, v).norm1();
    for (int j = 0; j <= 10; ++j) {
        const auto lv = pf.field.level(j);
        excess = std::max(excess, compensated_sum(lv) - n1);
    }
    r.checks.push_back(at_most("GF1 level sums minus norm", excess, 1e-6));
    return r;
}

SuiteResult fourier_structure(std::uint64_t seed)
{
    SuiteResult r;
    FourierFamilyOptions o;
    o.seed = seed;
    o.samples_per_alpha = 200;
    const auto fam = build_fourier_family(o);
    bool confined = true;
    try {
        fam.f.validate();
    } catch (const StageError&) {
        confined = false;
    }
    r.checks.push_back(at_least("spectrum confined to the block bands", confined ? 1.0 : 0.0, 1.0));

    double plateau = 0.0;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 20; ++i) {
        const double x = uniform01(rng);
        const cplx a = fam.f.partial_sum(fam.f.N(2), x);
        const cplx b = fam.f.partial_sum(fam.f.M(3) - 1, x);
        plateau = std::max(plateau, std::abs(a - b));
    }
    r.checks.push_back(at_most("plateau between blocks", plateau, 1e-12));
    double c = INFINITY;
    for (const auto& d : fam.diagnostics)
        for (const auto& b : d)
            if (!std::isnan(b.c_measured))
                c = std::min(c, b.c_measured);
    r.checks.push_back(at_least("P_k lower constant", c, 0.1));
    return r;
}

SuiteResult sets_besicovitch(std::uint64_t seed)
{
    SuiteResult r;
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double a = 0.05 * i;
        worst = std::max(worst, std::fabs(alpha_of_delta(delta_of_alpha(a)) - a));
    }
    r.checks.push_back(at_most("entropy inverse roundtrip", worst, 1e-10));
    int failures = 0;
    for (int i = 0; i < 200; ++i) {
        const auto w = sample_point(k_rule(), 24, seed + static_cast<std::uint64_t>(i));
        if (!sine_check(w).pass)
            ++failures;
    }
    r.checks.push_back(at_most("sine check failures", failures, 0));
    return r;
}

} // namespace

bool SuiteResult::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json SuiteResult::to_json() const
{
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
    return {{"format", "mfzoo-verify-v1"},
            {"instantiation", instantiation},
            {"suite", suite},
            {"seed", seed},
            {"pass", pass()},
            {"checks", std::move(arr)}};
}

std::vector<std::string> suites_for(const std::string& inst)
{
    if (inst == "dirichlet")
        return {"bridges"};
    if (inst == "haar")
        return {"gf"};
    if (inst == "poisson")
        return {"kernel"};
    if (inst == "fourier")
        return {"structure"};
    if (inst == "sets")
        return {"besicovitch"};
    return {};
}

SuiteResult run_suite(const std::string& inst, const std::string& suite, std::uint64_t seed)
{
    const auto known = suites_for(inst);
    if (std::find(known.begin(), known.end(), suite) == known.end())
        throw DomainError("no suite '" + suite + "' for instantiation '" + inst + "'");
    SuiteResult r;
    if (inst == "dirichlet")
        r = dirichlet_bridges(seed);
    else if (inst == "haar")
        r = haar_gf(seed);
    else if (inst == "poisson")
        r = poisson_kernel(seed);
    else if (inst == "fourier")
        r = fourier_structure(seed);
    else
        r = sets_besicovitch(seed);
    r.instantiation = inst;
    r.suite = suite;
    r.seed = seed;
    return r;
}

} // namespace mfzoo::cli
