#include "mfzoo/haar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "mfzoo/error.hpp"
#include "mfzoo/fractal_sets.hpp"
#include "mfzoo/numeric.hpp"

namespace mfzoo {

GridFunction::GridFunction(int depth_, std::vector<double> values_) : depth(depth_), values(std::move(values_))
{
    if (depth < 0 || depth > 30)
        throw DomainError("grid depth out of range");
    if (values.size() != pow2u(depth))
        throw DomainError("grid needs 2^depth values");
    for (double v : values)
        if (!std::isfinite(v))
            throw DomainError("grid values must be finite");
}

GridFunction GridFunction::constant(int depth, double v)
{
    if (depth < 0 || depth > 30)
        throw DomainError("grid depth out of range");
    return GridFunction(depth, std::vector<double>(pow2u(depth), v));
}

double GridFunction::norm2_squared() const
{
    CompensatedSum<double> acc;
    for (double v : values)
        acc.add(v * v);
    return std::ldexp(acc.value(), -depth);
}

double GridFunction::norm1() const
{
    CompensatedSum<double> acc;
    for (double v : values)
        acc.add(std::fabs(v));
    return std::ldexp(acc.value(), -depth);
}

double GridFunction::operator()(double x) const { return values[cube_of_point(x, depth).index]; }

namespace {
void same_depth(const GridFunction& a, const GridFunction& b)
{
    if (a.depth != b.depth)
        throw DomainError("grid depths differ");
}
} // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b)
{
    same_depth(a, b);
    GridFunction r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i)
        r.values[i] += b.values[i];
    return r;
}

GridFunction operator-(const GridFunction& a, const GridFunction& b)
{
    same_depth(a, b);
    GridFunction r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i)
        r.values[i] -= b.values[i];
    return r;
}

GridFunction operator*(double c, const GridFunction& a)
{
    GridFunction r = a;
    for (double& v : r.values)
        v *= c;
    return r;
}

std::vector<std::vector<double>> block_sums(const GridFunction& f)
{
    std::vector<std::vector<double>> s(static_cast<std::size_t>(f.depth) + 1);
    s[static_cast<std::size_t>(f.depth)] = f.values;
    for (int j = f.depth - 1; j >= 0; --j) {
        const auto& fine = s[static_cast<std::size_t>(j + 1)];
        auto& coarse = s[static_cast<std::size_t>(j)];
        coarse.resize(pow2u(j));
        for (std::size_t k = 0; k < coarse.size(); ++k)
            coarse[k] = fine[2 * k] + fine[2 * k + 1];
    }
    return s;
}

GridFunction haar_partial_sum(const GridFunction& f, int j)
{
    if (j < 0 || j > f.depth)
        throw DomainError("partial sum level outside 0..J");
    // Pairwise block sums: a block of equal values sums to an exact power of
    // two multiple, which keeps T_j idempotent and nested bit for bit.
    std::vector<double> cur = f.values;
    for (int l = f.depth - 1; l >= j; --l) {
        std::vector<double> next(pow2u(l));
        for (std::size_t k = 0; k < next.size(); ++k)
            next[k] = cur[2 * k] + cur[2 * k + 1];
        cur = std::move(next);
    }
    const int shift = f.depth - j;
    GridFunction out = GridFunction::zeros(f.depth);
    for (std::size_t k = 0; k < cur.size(); ++k) {
        const double mean = std::ldexp(cur[k], -shift);
        std::fill_n(out.values.begin() + static_cast<std::ptrdiff_t>(k << shift), std::size_t{1} << shift, mean);
    }
    return out;
}

CoefficientField haar_field(const GridFunction& f)
{
    const auto s = block_sums(f);
    std::vector<std::vector<double>> lv(s.size());
    for (int j = 0; j <= f.depth; ++j) {
        const auto& sj = s[static_cast<std::size_t>(j)];
        auto& out = lv[static_cast<std::size_t>(j)];
        out.resize(sj.size());
        const double scale = std::exp2(-0.5 * j);
        for (std::size_t k = 0; k < sj.size(); ++k)
            out[k] = std::fabs(scale * std::ldexp(sj[k], j - f.depth));
    }
    return CoefficientField(f.depth, std::move(lv), {{"generator", "haar_field"}, {"depth", f.depth}});
}

HaarCoefficients HaarCoefficients::zeros(int depth)
{
    HaarCoefficients c;
    c.depth = depth;
    c.detail.resize(static_cast<std::size_t>(depth));
    for (int j = 0; j < depth; ++j)
        c.detail[static_cast<std::size_t>(j)].assign(pow2u(j), 0.0);
    return c;
}

HaarCoefficients haar_transform(const GridFunction& f)
{
    const auto s = block_sums(f);
    HaarCoefficients c = HaarCoefficients::zeros(f.depth);
    c.mean = std::ldexp(s[0][0], -f.depth);
    for (int j = 0; j < f.depth; ++j) {
        const auto& fine = s[static_cast<std::size_t>(j + 1)];
        auto& d = c.detail[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < d.size(); ++k)
            d[k] = std::ldexp(fine[2 * k] - fine[2 * k + 1], -f.depth);
    }
    return c;
}

GridFunction haar_synthesize(const HaarCoefficients& c)
{
    // Coarse to fine: children = parent ± 2^j detail.
    std::vector<double> cur{c.mean};
    for (int j = 0; j < c.depth; ++j) {
        const auto& d = c.detail.at(static_cast<std::size_t>(j));
        std::vector<double> next(pow2u(j + 1));
        for (std::size_t k = 0; k < cur.size(); ++k) {
            const double v = std::ldexp(d[k], j);
            next[2 * k] = cur[k] + v;
            next[2 * k + 1] = cur[k] - v;
        }
        cur = std::move(next);
    }
    return GridFunction(c.depth, std::move(cur));
}

GridFunction gf2_build_haar(int j, std::span<const double> a, int depth)
{
    if (j < 0 || j > depth)
        throw DomainError("gf2 level must lie in 0..depth");
    if (a.size() != pow2u(j))
        throw DomainError("gf2 needs one value per cube of Λ_j");
    GridFunction f = GridFunction::zeros(depth);
    const double scale = std::exp2(0.5 * j);
    const int shift = depth - j;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double v = scale * std::fabs(a[k]);
        std::fill_n(f.values.begin() + static_cast<std::ptrdiff_t>(k << shift), std::size_t{1} << shift, v);
    }
    return f;
}

namespace {
void add_gf2(GridFunction& f, int j, const std::vector<std::uint64_t>& cubes, double amplitude, double weight)
{
    const double v = weight * std::exp2(0.5 * j) * amplitude;
    const int shift = f.depth - j;
    for (auto k : cubes) {
        auto first = f.values.begin() + static_cast<std::ptrdiff_t>(k << shift);
        std::for_each(first, first + (std::ptrdiff_t{1} << shift), [v](double& x) { x += v; });
    }
}
} // namespace

GridFunction build_from_cover(const Cover& covers, double alpha, int depth, const std::function<double(int)>& weight)
{
    GridFunction f = GridFunction::zeros(depth);
    const int top = std::min<int>(depth, static_cast<int>(covers.size()) - 1);
    for (int j = 1; j <= top; ++j) {
        const auto& c = covers[static_cast<std::size_t>(j)];
        if (c.empty())
            continue;
        for (auto k : c)
            if (k >= pow2u(j))
                throw DomainError("cover index outside Λ_" + std::to_string(j));
        const double a = std::exp2(-alpha * j);
        const double budget = static_cast<double>(c.size()) * a * a;
        if (budget > 1.0 + 1e-12)
            throw BudgetError(j, "cover budget exceeded at level " + std::to_string(j));
        const double w = weight ? weight(j) : 1.0 / (static_cast<double>(j) * j);
        add_gf2(f, j, c, a, w);
    }
    return f;
}

Cover besicovitch_covers(double alpha, int depth, CapRule cap, bool nested)
{
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw DomainError("cover exponent must lie in (0, 1/2]");
    if (depth < 0 || depth > 30)
        throw DomainError("cover depth out of range");
    Cover out(static_cast<std::size_t>(depth) + 1);
    out[0] = {0};
    for (int j = 1; j <= depth; ++j) {
        const double target = std::exp2(2.0 * alpha * j);
        std::uint64_t n = cap == CapRule::ceil ? static_cast<std::uint64_t>(std::ceil(target - 1e-9))
                                               : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(target + 1e-9)));
        std::vector<std::uint64_t> cand;
        if (nested) {
            for (auto k : out[static_cast<std::size_t>(j - 1)]) {
                cand.push_back(2 * k);
                cand.push_back(2 * k + 1);
            }
        } else {
            cand.resize(pow2u(j));
            std::iota(cand.begin(), cand.end(), std::uint64_t{0});
        }
        n = std::min<std::uint64_t>(n, cand.size());
        auto key = [](std::uint64_t k) { return std::pair{std::popcount(k), k}; };
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n), cand.end(),
                          [&](auto x, auto y) { return key(x) < key(y); });
        cand.resize(n);
        std::sort(cand.begin(), cand.end());
        out[static_cast<std::size_t>(j)] = std::move(cand);
    }
    return out;
}

GridFunction build_saturating(std::span<const double> alphas, int depth, const SaturatingOptions& opts)
{
    std::vector<double> fam(alphas.begin(), alphas.end());
    for (double a : fam)
        if (!(a > 0.0 && a <= 0.5))
            throw DomainError("saturating family members must lie in (0, 1/2]");
    std::sort(fam.begin(), fam.end());
    fam.erase(std::unique(fam.begin(), fam.end()), fam.end());

    GridFunction f = GridFunction::zeros(depth);
    if (!fam.empty() && fam.back() == 0.5)
        std::fill(f.values.begin(), f.values.end(), 1.0);

    auto source = opts.cover_source ? opts.cover_source
                                    : [&](double a, int d) { return besicovitch_covers(a, d, opts.cap, opts.nested); };
    Cover prev;
    for (double a : fam) {
        if (a == 0.5)
            break;
        const double beta = 0.5 - a;
        const double w = 1.0 - std::exp2(-beta);
        const Cover cv = source(a, depth);
        for (int j = 1; j <= depth; ++j) {
            const auto& c = cv.at(static_cast<std::size_t>(j));
            if (c.empty())
                continue;
            const double amp = std::min(std::exp2(-a * j), 1.0 / std::sqrt(static_cast<double>(c.size())));
            if (opts.shell && !prev.empty()) {
                const auto& p = prev[static_cast<std::size_t>(j)];
                std::vector<std::uint64_t> shell;
                std::set_difference(c.begin(), c.end(), p.begin(), p.end(), std::back_inserter(shell));
                add_gf2(f, j, shell, amp, w);
            } else {
                add_gf2(f, j, c, amp, w);
            }
        }
        prev = cv;
    }
    return f;
}

void BesovParams::validate() const
{
    if (!(s > 0.0 && s < 1.0))
        throw DomainError("Haar Besov smoothness must lie in (0,1)");
    if (!(p >= 1.0) || !(q >= 1.0))
        throw DomainError("Besov p and q must be at least 1");
    if (!(s - 1.0 / p > 0.0))
        throw DomainError("Besov parameters need s - 1/p > 0");
}

CoefficientField wavelet_leaders(const HaarCoefficients& c, const BesovParams& params)
{
    params.validate();
    if (c.depth < 1)
        throw DomainError("leaders need at least one detail level");
    const int top = c.depth - 1;
    // m[j][k]: max |detail| over the subtree rooted at (j,k).
    std::vector<std::vector<double>> m(static_cast<std::size_t>(c.depth));
    for (int j = top; j >= 0; --j) {
        const auto& d = c.detail[static_cast<std::size_t>(j)];
        auto& mj = m[static_cast<std::size_t>(j)];
        mj.resize(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) {
            double v = std::fabs(d[k]);
            if (j < top) {
                const auto& below = m[static_cast<std::size_t>(j + 1)];
                v = std::max({v, below[2 * k], below[2 * k + 1]});
            }
            mj[k] = v;
        }
    }
    std::vector<std::vector<double>> lv(static_cast<std::size_t>(c.depth));
    for (int j = 0; j <= top; ++j) {
        const auto& mj = m[static_cast<std::size_t>(j)];
        auto& out = lv[static_cast<std::size_t>(j)];
        out.resize(mj.size());
        const double wgt = std::exp2((params.s - 1.0 / params.p) * j);
        for (std::size_t k = 0; k < mj.size(); ++k) {
            double v = mj[k];
            if (k > 0)
                v = std::max(v, mj[k - 1]);
            if (k + 1 < mj.size())
                v = std::max(v, mj[k + 1]);
            out[k] = wgt * v;
        }
    }
    return CoefficientField(top, std::move(lv),
                            {{"generator", "wavelet_leaders"}, {"s", params.s}, {"p", params.p}, {"q", params.q}});
}

double besov_norm(const HaarCoefficients& c, const BesovParams& params)
{
    params.validate();
    CompensatedSum<double> outer;
    for (int j = 0; j < c.depth; ++j) {
        CompensatedSum<double> inner;
        for (double v : c.detail[static_cast<std::size_t>(j)])
            inner.add(std::pow(std::fabs(v), params.p));
        const double level = std::exp2((params.s * params.p - 1.0) * j) * inner.value();
        outer.add(std::pow(level, params.q / params.p));
    }
    return std::pow(outer.value(), 1.0 / params.q);
}

} // namespace mfzoo
