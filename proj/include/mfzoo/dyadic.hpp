#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfzoo {

// [k 2^-j, (k+1) 2^-j) on [0,1).
struct DyadicCube {
    int level = 0;
    std::uint64_t index = 0;

    double left() const;
    double right() const;
    double length() const;
    DyadicCube parent() const;
    bool contains(double x) const;
    // 3-fold enlargement [(k-1)2^-j, (k+2)2^-j) cut to [0,1).
    std::pair<double, double> enlarged() const;
    // True if `mu` (any level >= this level) lies inside the enlargement.
    bool enlargement_contains(const DyadicCube& mu) const;

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

DyadicCube cube_of_point(double x, int j);

class CoefficientField {
public:
    CoefficientField() = default;
    // Takes absolute values; throws DomainError on wrong lengths or non-finite entries.
    CoefficientField(int max_depth, std::vector<std::vector<double>> levels,
                     nlohmann::json meta = nlohmann::json::object());

    static CoefficientField zeros(int max_depth, nlohmann::json meta = nlohmann::json::object());

    int max_depth() const { return max_depth_; }
    std::span<const double> level(int j) const { return levels_.at(static_cast<std::size_t>(j)); }
    double at(int j, std::uint64_t k) const { return levels_.at(static_cast<std::size_t>(j)).at(k); }
    const nlohmann::json& meta() const { return meta_; }
    nlohmann::json& meta() { return meta_; }

    // e_j(x) = e at I_j(x), for j = 0..J.
    std::vector<double> chain(double x) const;
    CoefficientField scaled(double c) const;

private:
    int max_depth_ = 0;
    std::vector<std::vector<double>> levels_;
    nlohmann::json meta_ = nlohmann::json::object();
};

struct Window {
    int j_min = 1;
    int j_max = 1;
};

inline constexpr double kDefaultCap = 10.0;

struct ExponentEstimate {
    double lower = 0.0;
    double upper = 0.0;
    Window window;
    int tail_begin = 0;          // first level of the tail sub-window
    std::vector<double> ratios;  // per level j_min..j_max
    bool all_zero_tail = false;
};

// Length of the tail sub-window over [j_min, j_max].
int tail_length(Window w);

// Per-level ratio -log2(e)/j with zeros and values above cap sent to cap.
double level_ratio(double e, int j, double cap = kDefaultCap);

ExponentEstimate estimate_exponents(const CoefficientField& field, double x, Window window,
                                    double cap = kDefaultCap);
// Same estimator fed with e_j directly (chain[j] = e_j, j = 0..J); used where a
// full field at the wanted depth would not fit in memory.
ExponentEstimate estimate_exponents(std::span<const double> chain, Window window,
                                    double cap = kDefaultCap);

struct Gf1Report {
    double p = 2.0;
    double bound = 0.0;
    std::vector<double> norms;  // per level 0..J
    std::vector<bool> pass;
    bool all_pass = true;
};

Gf1Report gf1_check(const CoefficientField& field, double p, double bound, double rel_tol = 1e-12);

enum class LevelMode { lower, upper, limit };

const char* to_string(LevelMode m);
LevelMode level_mode_from_string(const std::string& s);

struct LevelSetGrid {
    int max_depth = 0;
    double alpha = 0.0;
    double eps = 0.0;
    LevelMode mode = LevelMode::limit;
    std::vector<std::vector<std::uint64_t>> cubes;  // sorted indices per level 0..J

    std::uint64_t count(int j) const { return cubes.at(static_cast<std::size_t>(j)).size(); }
    std::vector<std::uint64_t> counts() const;
};

LevelSetGrid full_grid(int max_depth);
LevelSetGrid grid_union(const LevelSetGrid& a, const LevelSetGrid& b);
bool grid_subset(const LevelSetGrid& a, const LevelSetGrid& b);

// Per-cube statistic a level-set threshold acts on: the cube ratio for
// limit mode, the min (lower) or max (upper) of ancestor ratios over the
// last ceil(j/2) levels ending at j.
struct LevelStatistics {
    int max_depth = 0;
    LevelMode mode = LevelMode::limit;
    std::vector<std::vector<double>> values;  // level 0 is empty
};

LevelStatistics level_statistics(const CoefficientField& field, LevelMode mode, double cap = kDefaultCap);
LevelSetGrid select_level_set(const LevelStatistics& stats, double alpha, double eps);
LevelSetGrid extract_level_set(const CoefficientField& field, double alpha, double eps, LevelMode mode,
                               double cap = kDefaultCap);

struct BoxDimension {
    double dimension = 0.0;
    double r2 = 0.0;
    int levels_used = 0;
};

// Slope of log2(count_j) against j over nonempty levels in [j_min, j_max]
// (defaults: 1 and J). Throws InsufficientData below 4 levels.
BoxDimension box_dimension(const LevelSetGrid& grid, std::optional<Window> window = std::nullopt);
BoxDimension box_dimension_counts(std::span<const std::uint64_t> counts, Window window);

struct SpectrumRow {
    double abscissa = 0.0;
    double dimension = 0.0;  // NaN when flagged insufficient
    double r2 = 0.0;
    int levels_used = 0;
    std::vector<std::uint64_t> counts;
    std::string flag = "ok";  // ok | insufficient | out_of_range
    double model = 0.0;       // NaN when no model supplied
};

struct SpectrumReport {
    double eps = 0.0;
    LevelMode mode = LevelMode::limit;
    std::vector<SpectrumRow> rows;

    std::string to_csv() const;
};

struct SpectrumOptions {
    double eps = 0.01;
    LevelMode mode = LevelMode::upper;
    double cap = kDefaultCap;
    std::optional<Window> window;
    std::function<double(double)> model;
};

SpectrumReport coarse_spectrum(const CoefficientField& field, std::span<const double> abscissae,
                               const SpectrumOptions& opts);

} // namespace mfzoo
