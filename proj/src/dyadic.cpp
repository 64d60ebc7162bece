#include "mfzoo/dyadic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "mfzoo/error.hpp"
#include "mfzoo/numeric.hpp"

namespace mfzoo {

double DyadicCube::left() const { return std::ldexp(static_cast<double>(index), -level); }
double DyadicCube::right() const { return std::ldexp(static_cast<double>(index + 1), -level); }
double DyadicCube::length() const { return std::ldexp(1.0, -level); }

DyadicCube DyadicCube::parent() const
{
    if (level == 0)
        throw DomainError("root cube has no parent");
    return {level - 1, index >> 1};
}

bool DyadicCube::contains(double x) const { return left() <= x && x < right(); }

std::pair<double, double> DyadicCube::enlarged() const
{
    const double h = length();
    return {std::max(0.0, left() - h), std::min(1.0, right() + h)};
}

bool DyadicCube::enlargement_contains(const DyadicCube& mu) const
{
    if (mu.level < level)
        return false;
    // mu lies in the level-`level` cube with index mu.index >> shift; since
    // mu is no larger than a level cube it sits inside 3λ iff that ancestor
    // is λ or one of its two neighbours.
    const std::uint64_t anc = mu.index >> (mu.level - level);
    return anc + 1 >= index && anc <= index + 1;
}

DyadicCube cube_of_point(double x, int j)
{
    if (!(x >= 0.0 && x < 1.0))
        throw DomainError("point outside [0,1)");
    if (j < 0 || j > 62)
        throw DomainError("level out of range");
    auto k = static_cast<std::uint64_t>(std::floor(std::ldexp(x, j)));
    k = std::min(k, pow2u(j) - 1);
    return {j, k};
}

CoefficientField::CoefficientField(int max_depth, std::vector<std::vector<double>> levels,
                                   nlohmann::json meta)
    : max_depth_(max_depth), levels_(std::move(levels)), meta_(std::move(meta))
{
    if (max_depth_ < 0 || max_depth_ > 40)
        throw DomainError("max_depth out of range");
    if (levels_.size() != static_cast<std::size_t>(max_depth_) + 1)
        throw DomainError("field needs one array per level 0..J");
    for (int j = 0; j <= max_depth_; ++j) {
        auto& lv = levels_[static_cast<std::size_t>(j)];
        if (lv.size() != pow2u(j))
            throw DomainError("level " + std::to_string(j) + " has wrong length");
        for (double& v : lv) {
            if (!std::isfinite(v))
                throw DomainError("non-finite coefficient at level " + std::to_string(j));
            v = std::fabs(v);
        }
    }
    if (meta_.is_null())
        meta_ = nlohmann::json::object();
}

CoefficientField CoefficientField::zeros(int max_depth, nlohmann::json meta)
{
    std::vector<std::vector<double>> lv(static_cast<std::size_t>(max_depth) + 1);
    for (int j = 0; j <= max_depth; ++j)
        lv[static_cast<std::size_t>(j)].assign(pow2u(j), 0.0);
    return CoefficientField(max_depth, std::move(lv), std::move(meta));
}

std::vector<double> CoefficientField::chain(double x) const
{
    const DyadicCube leaf = cube_of_point(x, max_depth_);
    std::vector<double> out(static_cast<std::size_t>(max_depth_) + 1);
    for (int j = 0; j <= max_depth_; ++j)
        out[static_cast<std::size_t>(j)] = levels_[static_cast<std::size_t>(j)][leaf.index >> (max_depth_ - j)];
    return out;
}

CoefficientField CoefficientField::scaled(double c) const
{
    auto lv = levels_;
    for (auto& l : lv)
        for (double& v : l)
            v *= c;
    return CoefficientField(max_depth_, std::move(lv), meta_);
}

int tail_length(Window w) { return (w.j_max - w.j_min + 2) / 2; }

double level_ratio(double e, int j, double cap)
{
    if (!(e > 0.0))
        return cap;
    const double r = -std::log2(e) / static_cast<double>(j);
    return r > cap ? cap : r;
}

ExponentEstimate estimate_exponents(std::span<const double> chain, Window window, double cap)
{
    const int J = static_cast<int>(chain.size()) - 1;
    if (window.j_min < 1 || window.j_max > J || window.j_min > window.j_max)
        throw DomainError("window must satisfy 1 <= j_min <= j_max <= J");
    ExponentEstimate est;
    est.window = window;
    est.tail_begin = window.j_max - tail_length(window) + 1;
    est.ratios.reserve(static_cast<std::size_t>(window.j_max - window.j_min + 1));
    for (int j = window.j_min; j <= window.j_max; ++j)
        est.ratios.push_back(level_ratio(chain[static_cast<std::size_t>(j)], j, cap));

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    bool all_zero = true;
    for (int j = est.tail_begin; j <= window.j_max; ++j) {
        const double r = est.ratios[static_cast<std::size_t>(j - window.j_min)];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        if (chain[static_cast<std::size_t>(j)] > 0.0)
            all_zero = false;
    }
    est.all_zero_tail = all_zero;
    if (all_zero) {
        est.lower = est.upper = cap;
    } else {
        est.lower = lo;
        est.upper = hi;
    }
    return est;
}

ExponentEstimate estimate_exponents(const CoefficientField& field, double x, Window window, double cap)
{
    if (window.j_max > field.max_depth())
        throw DomainError("window exceeds field depth");
    const auto c = field.chain(x);
    return estimate_exponents(std::span<const double>(c), window, cap);
}

Gf1Report gf1_check(const CoefficientField& field, double p, double bound, double rel_tol)
{
    if (!(p >= 1.0))
        throw DomainError("gf1_check needs p >= 1");
    Gf1Report rep;
    rep.p = p;
    rep.bound = bound;
    for (int j = 0; j <= field.max_depth(); ++j) {
        CompensatedSum<double> acc;
        for (double e : field.level(j))
            acc.add(p == 2.0 ? e * e : std::pow(e, p));
        const double s = acc.value();
        const double norm = p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
        rep.norms.push_back(norm);
        const bool ok = norm <= bound * (1.0 + rel_tol);
        rep.pass.push_back(ok);
        rep.all_pass = rep.all_pass && ok;
    }
    return rep;
}

const char* to_string(LevelMode m)
{
    switch (m) {
    case LevelMode::lower: return "lower";
    case LevelMode::upper: return "upper";
    case LevelMode::limit: return "limit";
    }
    return "limit";
}

LevelMode level_mode_from_string(const std::string& s)
{
    if (s == "lower")
        return LevelMode::lower;
    if (s == "upper")
        return LevelMode::upper;
    if (s == "limit")
        return LevelMode::limit;
    throw DomainError("unknown level-set mode '" + s + "'");
}

std::vector<std::uint64_t> LevelSetGrid::counts() const
{
    std::vector<std::uint64_t> out;
    out.reserve(cubes.size());
    for (const auto& c : cubes)
        out.push_back(c.size());
    return out;
}

LevelSetGrid full_grid(int max_depth)
{
    LevelSetGrid g;
    g.max_depth = max_depth;
    g.cubes.resize(static_cast<std::size_t>(max_depth) + 1);
    for (int j = 0; j <= max_depth; ++j) {
        auto& c = g.cubes[static_cast<std::size_t>(j)];
        c.resize(pow2u(j));
        for (std::uint64_t k = 0; k < c.size(); ++k)
            c[k] = k;
    }
    return g;
}

LevelSetGrid grid_union(const LevelSetGrid& a, const LevelSetGrid& b)
{
    LevelSetGrid g;
    g.max_depth = std::max(a.max_depth, b.max_depth);
    g.alpha = a.alpha;
    g.eps = a.eps;
    g.mode = a.mode;
    g.cubes.resize(static_cast<std::size_t>(g.max_depth) + 1);
    for (std::size_t j = 0; j < g.cubes.size(); ++j) {
        static const std::vector<std::uint64_t> empty;
        const auto& x = j < a.cubes.size() ? a.cubes[j] : empty;
        const auto& y = j < b.cubes.size() ? b.cubes[j] : empty;
        std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(g.cubes[j]));
    }
    return g;
}

bool grid_subset(const LevelSetGrid& a, const LevelSetGrid& b)
{
    for (std::size_t j = 0; j < a.cubes.size(); ++j) {
        if (a.cubes[j].empty())
            continue;
        if (j >= b.cubes.size())
            return false;
        if (!std::includes(b.cubes[j].begin(), b.cubes[j].end(), a.cubes[j].begin(), a.cubes[j].end()))
            return false;
    }
    return true;
}

LevelStatistics level_statistics(const CoefficientField& field, LevelMode mode, double cap)
{
    const int J = field.max_depth();
    std::vector<std::vector<double>> ratio(static_cast<std::size_t>(J) + 1);
    for (int j = 1; j <= J; ++j) {
        const auto lv = field.level(j);
        auto& r = ratio[static_cast<std::size_t>(j)];
        r.resize(lv.size());
        for (std::size_t k = 0; k < lv.size(); ++k)
            r[k] = level_ratio(lv[k], j, cap);
    }
    LevelStatistics st;
    st.max_depth = J;
    st.mode = mode;
    if (mode == LevelMode::limit) {
        st.values = std::move(ratio);
        return st;
    }
    st.values.resize(static_cast<std::size_t>(J) + 1);
    const bool take_min = mode == LevelMode::lower;
    for (int j = 1; j <= J; ++j) {
        const int lo = j - tail_length({1, j}) + 1;
        auto& out = st.values[static_cast<std::size_t>(j)];
        out = ratio[static_cast<std::size_t>(j)];
        for (int i = lo; i < j; ++i) {
            const auto& ri = ratio[static_cast<std::size_t>(i)];
            const int shift = j - i;
            for (std::size_t k = 0; k < out.size(); ++k) {
                const double v = ri[k >> shift];
                out[k] = take_min ? std::min(out[k], v) : std::max(out[k], v);
            }
        }
    }
    return st;
}

LevelSetGrid select_level_set(const LevelStatistics& stats, double alpha, double eps)
{
    if (!(eps > 0.0))
        throw DomainError("level-set tolerance must be positive");
    LevelSetGrid g;
    g.max_depth = stats.max_depth;
    g.alpha = alpha;
    g.eps = eps;
    g.mode = stats.mode;
    g.cubes.resize(static_cast<std::size_t>(stats.max_depth) + 1);
    for (int j = 1; j <= stats.max_depth; ++j) {
        const auto& v = stats.values[static_cast<std::size_t>(j)];
        auto& out = g.cubes[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < v.size(); ++k) {
            const bool in = stats.mode == LevelMode::limit ? std::fabs(v[k] - alpha) <= eps
                                                           : v[k] <= alpha + eps;
            if (in)
                out.push_back(k);
        }
    }
    return g;
}

LevelSetGrid extract_level_set(const CoefficientField& field, double alpha, double eps, LevelMode mode,
                               double cap)
{
    return select_level_set(level_statistics(field, mode, cap), alpha, eps);
}

BoxDimension box_dimension_counts(std::span<const std::uint64_t> counts, Window window)
{
    std::vector<double> xs, ys;
    for (int j = window.j_min; j <= window.j_max && j < static_cast<int>(counts.size()); ++j) {
        const auto c = counts[static_cast<std::size_t>(j)];
        if (c == 0)
            continue;
        xs.push_back(static_cast<double>(j));
        ys.push_back(std::log2(static_cast<double>(c)));
    }
    if (xs.size() < 4)
        throw InsufficientData("box dimension needs at least 4 nonempty levels, got " +
                               std::to_string(xs.size()));
    const auto fit = least_squares(xs, ys);
    return {fit.slope, fit.r2, static_cast<int>(xs.size())};
}

BoxDimension box_dimension(const LevelSetGrid& grid, std::optional<Window> window)
{
    const Window w = window.value_or(Window{1, grid.max_depth});
    const auto c = grid.counts();
    return box_dimension_counts(c, w);
}

namespace {

// Shortest text that reads back to the same double.
std::string shortest(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

} // namespace

std::string SpectrumReport::to_csv() const
{
    std::string out = "abscissa,dim_estimate,r2,levels_used,flag\n";
    for (const auto& r : rows)
        out += shortest(r.abscissa) + ',' + shortest(r.dimension) + ',' + shortest(r.r2) + ',' +
               std::to_string(r.levels_used) + ',' + r.flag + '\n';
    return out;
}

SpectrumReport coarse_spectrum(const CoefficientField& field, std::span<const double> abscissae,
                               const SpectrumOptions& opts)
{
    if (abscissae.empty())
        throw DomainError("coarse_spectrum needs at least one abscissa");
    for (double a : abscissae)
        if (!(a >= 0.0 && a <= opts.cap))
            throw DomainError("abscissa outside [0, cap]");
    const auto stats = level_statistics(field, opts.mode, opts.cap);
    const Window w = opts.window.value_or(Window{1, field.max_depth()});

    SpectrumReport rep;
    rep.eps = opts.eps;
    rep.mode = opts.mode;
    rep.rows.resize(abscissae.size());
    parallel_for(abscissae.size(), [&](std::size_t i) {
        SpectrumRow row;
        row.abscissa = abscissae[i];
        row.model = opts.model ? opts.model(row.abscissa) : std::numeric_limits<double>::quiet_NaN();
        const auto grid = select_level_set(stats, row.abscissa, opts.eps);
        row.counts = grid.counts();
        try {
            const auto bd = box_dimension_counts(row.counts, w);
            row.dimension = bd.dimension;
            row.r2 = bd.r2;
            row.levels_used = bd.levels_used;
            if (bd.dimension < -0.2 || bd.dimension > 1.2)
                row.flag = "out_of_range";
        } catch (const InsufficientData&) {
            row.dimension = std::numeric_limits<double>::quiet_NaN();
            row.r2 = std::numeric_limits<double>::quiet_NaN();
            int used = 0;
            for (int j = w.j_min; j <= w.j_max; ++j)
                used += row.counts[static_cast<std::size_t>(j)] > 0 ? 1 : 0;
            row.levels_used = used;
            row.flag = "insufficient";
        }
        rep.rows[i] = std::move(row);
    });
    return rep;
}

} // namespace mfzoo
