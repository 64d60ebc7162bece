#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfzoo/dirichlet.hpp"
#include "mfzoo/error.hpp"
#include "mfzoo/fourier.hpp"
#include "mfzoo/fractal_sets.hpp"
#include "mfzoo/haar.hpp"
#include "mfzoo/io.hpp"
#include "mfzoo/poisson.hpp"
#include "suites.hpp"

using namespace mfzoo;
using nlohmann::json;

namespace {

enum Exit { ok = 0, config = 2, verification = 3, io = 4 };

struct ConfigError : Error {
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

struct VerifyFailed {
    json report;
};

// Files written by this run, removed again if it fails.
std::vector<fs::path> g_written;

void emit(const fs::path& p)
{
    g_written.push_back(p);
}

void cleanup()
{
    std::error_code ec;
    for (const auto& p : g_written) {
        fs::remove(p, ec);
        fs::remove(sidecar_path(p), ec);
    }
}

// "a:b:s" inclusive of b within 1e-9, "a,b,c", or a single number.
std::vector<double> parse_range(const std::string& s)
{
    std::vector<double> out;
    auto num = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size() || t.empty() || !std::isfinite(v))
            throw ConfigError("bad number '" + t + "' in range '" + s + "'");
        return v;
    };
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string p;
        while (std::getline(ss, p, ':'))
            parts.push_back(p);
        if (parts.size() != 3)
            throw ConfigError("range must be start:stop:step, got '" + s + "'");
        const double a = num(parts[0]), b = num(parts[1]), h = num(parts[2]);
        if (!(h > 0.0) || b < a)
            throw ConfigError("range needs step > 0 and stop >= start: '" + s + "'");
        for (long i = 0;; ++i) {
            const double v = a + static_cast<double>(i) * h;
            if (v > b + 1e-9)
                break;
            out.push_back(std::round(v * 1e12) / 1e12);
            if (out.size() > 100000)
                throw ConfigError("range '" + s + "' has too many points");
        }
        return out;
    }
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ','))
        out.push_back(num(p));
    if (out.empty())
        throw ConfigError("empty list");
    return out;
}

void write_text(const fs::path& out, const std::string& text)
{
    atomic_write(out, text);
    emit(out);
}

void write_json_or_stdout(const std::optional<std::string>& out, const json& j)
{
    if (out)
        write_text(*out, j.dump(2) + "\n");
    else
        std::cout << j.dump(2) << "\n";
}

std::uint64_t need_seed(const std::optional<std::uint64_t>& seed, const std::string& what)
{
    if (!seed)
        throw ConfigError(what + " is stochastic and needs --seed");
    return *seed;
}

void check_range(const char* name, double v, double lo, double hi)
{
    if (!(v >= lo && v <= hi)) {
        std::ostringstream os;
        os << name << " = " << v << " outside [" << lo << ", " << hi << "]";
        throw ConfigError(os.str());
    }
}

std::string svg_plot(const SpectrumReport& rep, const std::string& model_name)
{
    const double W = 640, H = 420, L = 60, B = 50, T = 20, Rm = 20;
    double xmin = INFINITY, xmax = -INFINITY;
    for (const auto& r : rep.rows) {
        xmin = std::min(xmin, r.abscissa);
        xmax = std::max(xmax, r.abscissa);
    }
    if (!(xmax > xmin)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    auto X = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - Rm); };
    auto Y = [&](double y) { return H - B - std::clamp(y, 0.0, 1.0) * (H - B - T); };
    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - Rm << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double y = 0.25 * i;
        os << "<text x=\"" << L - 8 << "\" y=\"" << Y(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << y
           << "</text>\n";
    }
    os << "<text x=\"" << X(xmin) << "\" y=\"" << H - B + 18 << "\" font-size=\"11\">" << xmin << "</text>\n";
    os << "<text x=\"" << X(xmax) << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"end\">" << xmax
       << "</text>\n";
    os << "<text x=\"" << (L + W - Rm) / 2 << "\" y=\"" << H - 12
       << "\" font-size=\"12\" text-anchor=\"middle\">abscissa</text>\n";

    auto polyline = [&](auto value, const char* color, const char* dash) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << " points=\"";
        for (const auto& r : rep.rows) {
            const double v = value(r);
            if (std::isfinite(v))
                os << X(r.abscissa) << ',' << Y(v) << ' ';
        }
        os << "\"/>\n";
    };
    if (!model_name.empty())
        polyline([](const SpectrumRow& r) { return r.model; }, "gray", " stroke-dasharray=\"6 4\"");
    polyline([](const SpectrumRow& r) { return r.dimension; }, "steelblue", "");
    for (const auto& r : rep.rows)
        if (std::isfinite(r.dimension))
            os << "<circle cx=\"" << X(r.abscissa) << "\" cy=\"" << Y(r.dimension)
               << "\" r=\"3\" fill=\"steelblue\"/>\n";
    os << "<text x=\"" << L + 10 << "\" y=\"" << T + 12 << "\" font-size=\"12\" fill=\"steelblue\">estimate</text>\n";
    if (!model_name.empty())
        os << "<text x=\"" << L + 10 << "\" y=\"" << T + 28 << "\" font-size=\"12\" fill=\"gray\">" << model_name
           << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

// Theoretical line stored in the field metadata by `generate`.
std::function<double(double)> model_of(const json& meta, std::string& name)
{
    const std::string m = meta.is_object() ? meta.value("model", "") : "";
    if (m == "2a") {
        name = "dim = 2a";
        return [](double a) { return std::min(1.0, 2 * a); };
    }
    return {};
}

struct Opts {
    std::string instantiation = "haar";
    std::string alpha_grid = "0.1:0.5:0.1";
    int depth = 16;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string in;
    int k_max = 3;
    double p = 2.0;
    int samples = 1000;
    double delta = 0.5;
    int count = 100;
    std::string mode = "k";
    std::string profile = "spike";
    double beta = 0.25;
    double x0 = 1.0 / 3.0;
    std::string abscissae = "0.05:0.5:0.05";
    double eps = 0.01;
    std::string level_mode = "upper";
    std::optional<std::string> svg;
    std::string points;
    std::string suite;
    bool pure_json = false;
    bool nested = false;
    bool floor_cap = false;
    bool no_shell = false;
};

int cmd_generate(const Opts& o)
{
    if (!o.out)
        throw ConfigError("generate needs --out");
    const fs::path out = *o.out;
    const auto& inst = o.instantiation;
    if (inst == "haar") {
        const auto alphas = parse_range(o.alpha_grid);
        for (double a : alphas)
            check_range("alpha", a, 1e-9, 0.5);
        check_range("depth", o.depth, 1, 24);
        SaturatingOptions so;
        so.cap = o.floor_cap ? CapRule::floor : CapRule::ceil;
        so.nested = o.nested;
        so.shell = !o.no_shell;
        auto field = haar_field(build_saturating(alphas, o.depth, so));
        field.meta() = {{"instantiation", "haar"}, {"alphas", alphas}, {"depth", o.depth}, {"model", "2a"}};
        if (o.seed)
            field.meta()["seed"] = *o.seed;
        emit(out);
        write_field(out, field, o.pure_json);
    } else if (inst == "poisson") {
        check_range("depth", o.depth, 1, 16);
        CircleFunction f = CircleFunction::from_modes({0.5, 1.0, 0.5});
        if (o.profile == "spike") {
            check_range("beta", o.beta, 0.0, 1.0);
            check_range("x0", o.x0, 0.0, 1.0 - 1e-12);
            f = CircleFunction::from_grid(spike_ladder(o.x0, o.beta, o.depth));
        } else if (o.profile != "cos") {
            throw ConfigError("unknown --profile '" + o.profile + "' (spike or cos)");
        }
        auto pf = poisson_field(f, o.depth);
        pf.field.meta() = {{"instantiation", "poisson"},
                           {"profile", o.profile},
                           {"depth", o.depth},
                           {"resolution_log2", pf.resolution_log2}};
        if (o.profile == "spike")
            pf.field.meta()["beta"] = o.beta, pf.field.meta()["x0"] = o.x0;
        emit(out);
        write_field(out, pf.field, o.pure_json);
    } else if (inst == "fourier" || inst == "dirichlet") {
        BlockFunction f;
        if (inst == "dirichlet" && !o.in.empty()) {
            f = read_block_function(o.in);
        } else {
            FourierFamilyOptions fo;
            fo.seed = need_seed(o.seed, inst);
            check_range("k_max", o.k_max, 2, 4);
            check_range("p", o.p, 1.0, 1e6);
            check_range("samples", o.samples, 10, 100000);
            fo.k_max = o.k_max;
            fo.p = o.p;
            fo.samples_per_alpha = o.samples;
            fo.alphas = {1.0};
            for (double a : parse_range(o.alpha_grid)) {
                check_range("alpha", a, 1e-9, 1.0);
                if (a != 1.0)
                    fo.alphas.push_back(a);
            }
            f = build_fourier_family(fo).f;
        }
        if (inst == "fourier") {
            emit(out);
            write_block_function(out, f);
            for (std::size_t i = 0; i < f.blocks.size(); ++i) {
                const fs::path bp = out.string() + ".b" + std::to_string(i) + ".trig";
                emit(bp);
            }
        } else {
            const auto r = compose_multifractal_ds(f);
            if (!r.holds)
                throw VerifyFailed{{{"check", "bessel"}, {"energy", r.coeff_energy}, {"norm", r.norm_squared}}};
            emit(out);
            write_ds(out, r.g);
        }
    } else if (inst == "sets") {
        const auto seed = need_seed(o.seed, "sets");
        check_range("depth", o.depth, 1, 100000);
        check_range("count", o.count, 1, 10000000);
        SampleRule rule;
        if (o.mode == "k") {
            rule = k_rule();
        } else if (o.mode == "falpha") {
            const auto a = parse_range(o.alpha_grid);
            if (a.size() != 1)
                throw ConfigError("sets falpha takes a single --alpha-grid value");
            check_range("alpha", a[0], 1e-9, 1.0);
            rule = f_alpha_rule(a[0]);
        } else if (o.mode == "plain") {
            check_range("delta", o.delta, 1e-12, 0.5);
            rule = plain_rule(o.delta);
        } else {
            throw ConfigError("unknown --mode '" + o.mode + "' (k, falpha or plain)");
        }
        write_text(out, sample_batch_csv(rule, o.depth, seed, o.count));
    } else {
        throw ConfigError("unknown instantiation '" + inst + "'");
    }
    return ok;
}

int cmd_analyze(const Opts& o)
{
    if (o.in.empty())
        throw ConfigError("analyze needs --in");
    const auto fmt = sniff_format(o.in);
    const std::vector<double> xs = o.points.empty() ? std::vector<double>{} : parse_range(o.points);
    json rep{{"format", "mfzoo-analysis-v1"}, {"input_format", fmt}};
    if (fmt == "mfzoo-field-v1") {
        const auto f = read_field(o.in);
        const int J = f.max_depth();
        std::vector<double> sums;
        for (int j = 0; j <= J; ++j) {
            std::vector<double> sq;
            for (double v : f.level(j))
                sq.push_back(v * v);
            sums.push_back(compensated_sum(sq));
        }
        rep["max_depth"] = J;
        rep["level_energy"] = sums;
        rep["meta"] = f.meta();
        json ex = json::array();
        for (double x : xs) {
            check_range("point", x, 0.0, 1.0 - 1e-15);
            const auto e = estimate_exponents(f, x, Window{1, J});
            ex.push_back({{"x", x}, {"lower", e.lower}, {"upper", e.upper}, {"tail_begin", e.tail_begin}});
        }
        rep["exponents"] = std::move(ex);
    } else if (fmt == "mfzoo-blocks-v1") {
        const auto f = read_block_function(o.in);
        f.validate();
        rep["norm2_squared"] = f.norm2_squared();
        rep["blocks"] = f.blocks.size();
        int kmax = 0;
        for (const auto& b : f.blocks)
            kmax = std::max(kmax, b.k);
        json div = json::array();
        for (double x : xs) {
            check_range("point", x, 0.0, 1.0 - 1e-15);
            const auto d = fs_divergence_index(f, x, kmax);
            div.push_back({{"x", x}, {"beta_minus", d.beta_minus}, {"beta_plus", d.beta_plus}});
        }
        rep["divergence"] = std::move(div);
    } else if (fmt == "mfzoo-ds-v1") {
        const auto g = read_ds(o.in);
        rep["n_max"] = g.n_max();
        rep["h2_norm"] = g.h2_norm();
        if (g.h2_norm() > 0.0 && g.n_max() <= 20000)
            rep["embedding_ratio"] = embedding_check(g);
        const auto sched = ds_schedule(g.n_max());
        json div = json::array();
        if (sched.size() >= 4)
            for (double t : xs) {
                check_range("t", t, -1e6, 1e6);
                const auto d = ds_divergence_index(g, t, sched);
                div.push_back({{"t", t}, {"beta_minus", d.beta_minus}, {"beta_plus", d.beta_plus}});
            }
        rep["divergence"] = std::move(div);
    } else {
        throw FormatError(o.in + ": not a field, blocks or ds file");
    }
    write_json_or_stdout(o.out, rep);
    return ok;
}

int cmd_spectrum(const Opts& o)
{
    if (o.in.empty() || !o.out)
        throw ConfigError("spectrum needs --in and --out");
    const auto ab = parse_range(o.abscissae);
    check_range("eps", o.eps, 0.0, 10.0);
    const auto f = read_field(o.in);
    SpectrumOptions so;
    so.eps = o.eps;
    try {
        so.mode = level_mode_from_string(o.level_mode);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    std::string model_name;
    so.model = model_of(f.meta(), model_name);
    const auto rep = coarse_spectrum(f, ab, so);
    write_text(*o.out, rep.to_csv());
    const fs::path svg = o.svg ? fs::path(*o.svg) : fs::path(*o.out + ".svg");
    write_text(svg, svg_plot(rep, model_name));
    return ok;
}

int cmd_verify(const Opts& o)
{
    const auto known = cli::suites_for(o.instantiation);
    if (known.empty())
        throw ConfigError("unknown instantiation '" + o.instantiation + "'");
    const std::string suite = o.suite.empty() ? known.front() : o.suite;
    if (std::find(known.begin(), known.end(), suite) == known.end())
        throw ConfigError("no suite '" + suite + "' for " + o.instantiation);
    const auto r = cli::run_suite(o.instantiation, suite, need_seed(o.seed, "verify"));
    write_json_or_stdout(o.out, r.to_json());
    return r.pass() ? ok : verification;
}

void fail_json(const char* kind, const std::string& msg)
{
    std::cerr << json{{"error", kind}, {"message", msg}}.dump() << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multifractal analysis toolkit"};
    app.require_subcommand(1);
    Opts o;
    std::optional<unsigned> threads;
    app.add_option("--threads", threads, "Worker cap (overrides MFZOO_THREADS)");

    auto* gen = app.add_subcommand("generate", "Build a construction and write it to disk");
    gen->add_option("--instantiation", o.instantiation, "haar|poisson|fourier|dirichlet|sets")->capture_default_str();
    gen->add_option("--alpha-grid", o.alpha_grid, "Alpha values, start:stop:step or a,b,c")->capture_default_str();
    gen->add_option("--depth", o.depth, "Depth J")->capture_default_str();
    gen->add_option("--seed", o.seed, "Seed (fourier, dirichlet, sets)");
    gen->add_option("--out", o.out, "Output file")->required();
    gen->add_option("--in", o.in, "dirichlet: compose from this blocks file");
    gen->add_option("--k-max", o.k_max, "Fourier blocks up to k_max")->capture_default_str();
    gen->add_option("--p", o.p, "Fourier gauge exponent")->capture_default_str();
    gen->add_option("--samples", o.samples, "F_alpha samples per alpha")->capture_default_str();
    gen->add_option("--delta", o.delta, "sets plain mode digit density")->capture_default_str();
    gen->add_option("--count", o.count, "sets sample count")->capture_default_str();
    gen->add_option("--mode", o.mode, "sets sampler: k|falpha|plain")->capture_default_str();
    gen->add_option("--profile", o.profile, "poisson source: spike|cos")->capture_default_str();
    gen->add_option("--beta", o.beta, "poisson spike exponent")->capture_default_str();
    gen->add_option("--x0", o.x0, "poisson spike point")->capture_default_str();
    gen->add_flag("--pure-json", o.pure_json, "Embed field levels in the JSON (depth <= 12)");
    gen->add_flag("--nested", o.nested, "haar: nested covers");
    gen->add_flag("--floor-cap", o.floor_cap, "haar: floor instead of ceil cover cap");
    gen->add_flag("--no-shell", o.no_shell, "haar: let every member charge its whole cover");

    auto* ana = app.add_subcommand("analyze", "Summarize a field, blocks or Dirichlet file");
    ana->add_option("--in", o.in, "Input file")->required();
    ana->add_option("--points", o.points, "Points x (field, blocks) or t values (ds)");
    ana->add_option("--out", o.out, "JSON output (stdout if absent)");

    auto* spec = app.add_subcommand("spectrum", "Coarse spectrum of a field as CSV plus SVG");
    spec->add_option("--in", o.in, "Field file")->required();
    spec->add_option("--abscissae", o.abscissae, "Alpha values")->capture_default_str();
    spec->add_option("--eps", o.eps, "Level-set half width")->capture_default_str();
    spec->add_option("--mode", o.level_mode, "lower|upper|limit")->capture_default_str();
    spec->add_option("--out", o.out, "CSV output")->required();
    spec->add_option("--svg", o.svg, "SVG output (default <out>.svg)");

    auto* ver = app.add_subcommand("verify", "Run a verifier suite");
    ver->add_option("--instantiation", o.instantiation, "haar|poisson|fourier|dirichlet|sets")->required();
    ver->add_option("--suite", o.suite, "Suite name (default: first for the instantiation)");
    ver->add_option("--seed", o.seed, "Seed")->required();
    ver->add_option("--out", o.out, "JSON output (stdout if absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fail_json("config", e.what());
        return config;
    }
    if (threads)
        set_max_threads(*threads);

    try {
        if (gen->parsed())
            return cmd_generate(o);
        if (ana->parsed())
            return cmd_analyze(o);
        if (spec->parsed())
            return cmd_spectrum(o);
        return cmd_verify(o);
    } catch (const VerifyFailed& v) {
        cleanup();
        std::cerr << json{{"error", "verification"}, {"detail", v.report}}.dump() << "\n";
        return verification;
    } catch (const IoError& e) {
        cleanup();
        fail_json(e.kind(), e.what());
        return io;
    } catch (const FormatError& e) {
        cleanup();
        fail_json(e.kind(), e.what());
        return io;
    } catch (const ConfigError& e) {
        cleanup();
        fail_json(e.kind(), e.what());
        return config;
    } catch (const DomainError& e) {
        cleanup();
        fail_json(e.kind(), e.what());
        return config;
    } catch (const InsufficientData& e) {
        cleanup();
        fail_json(e.kind(), e.what());
        return config;
    } catch (const Error& e) {
        cleanup();
        fail_json(e.kind(), e.what());
        return verification;
    } catch (const std::exception& e) {
        cleanup();
        fail_json("internal", e.what());
        return verification;
    }
}
