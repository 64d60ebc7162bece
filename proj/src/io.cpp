#include "mfzoo/io.hpp"

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "mfzoo/error.hpp"

namespace mfzoo {

using nlohmann::json;

namespace {

void put_f64(std::string& out, double v)
{
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    for (int b = 0; b < 8; ++b)
        out.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
}

std::vector<double> get_f64(const std::string& bytes, std::size_t expect, const fs::path& where)
{
    if (bytes.size() != 8 * expect)
        throw FormatError(where.string() + ": expected " + std::to_string(expect) + " values, found " +
                          std::to_string(bytes.size() / 8) + (bytes.size() % 8 ? " and a partial one" : ""));
    std::vector<double> v(expect);
    for (std::size_t i = 0; i < expect; ++i) {
        std::uint64_t u = 0;
        for (int b = 0; b < 8; ++b)
            u |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 * i + b])) << (8 * b);
        std::memcpy(&v[i], &u, 8);
    }
    return v;
}

std::string pack(std::span<const double> v)
{
    std::string out;
    out.reserve(8 * v.size());
    for (double x : v)
        put_f64(out, x);
    return out;
}

std::string pack(std::span<const cplx> v)
{
    std::string out;
    out.reserve(16 * v.size());
    for (const auto& z : v) {
        put_f64(out, z.real());
        put_f64(out, z.imag());
    }
    return out;
}

std::vector<cplx> unpack_pairs(const std::string& bytes, std::size_t n, const fs::path& where)
{
    const auto flat = get_f64(bytes, 2 * n, where);
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = {flat[2 * i], flat[2 * i + 1]};
    return v;
}

json read_header(const fs::path& path, const std::string& format)
{
    json h;
    try {
        h = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": not JSON (" + e.what() + ")");
    }
    if (!h.is_object() || h.value("format", "") != format)
        throw FormatError(path.string() + ": expected format " + format);
    return h;
}

// Sidecar name from the header, resolved next to it.
std::string read_payload(const fs::path& header, const json& h)
{
    if (!h.contains("data") || !h["data"].is_string())
        throw FormatError(header.string() + ": missing data reference");
    return read_file(header.parent_path() / h["data"].get<std::string>());
}

void write_with_sidecar(const fs::path& path, json h, const std::string& payload)
{
    const fs::path side = sidecar_path(path);
    h["data"] = side.filename().string();
    atomic_write(side, payload);
    atomic_write(path, h.dump(2) + "\n");
}

template <class T>
T field_of(const json& h, const char* key, const fs::path& where)
{
    try {
        return h.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(where.string() + ": bad or missing field '" + key + "'");
    }
}

json schedule_json(const SparseSchedule& s)
{
    if (s.is_default_rule())
        return {{"rule", "squares"}, {"offset", s.offset()}};
    return {{"rule", "explicit"}, {"terms", s.terms()}};
}

SparseSchedule schedule_from(const json& j, const fs::path& where)
{
    const auto rule = field_of<std::string>(j, "rule", where);
    if (rule == "squares")
        return SparseSchedule{}.shifted(field_of<int>(j, "offset", where));
    if (rule == "explicit")
        return SparseSchedule(field_of<std::vector<int>>(j, "terms", where));
    throw FormatError(where.string() + ": unknown schedule rule " + rule);
}

} // namespace

void atomic_write(const fs::path& path, const std::string& bytes)
{
    std::random_device rd;
    const fs::path tmp = path.string() + ".tmp" + std::to_string(rd());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw IoError("cannot open " + tmp.string() + " for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

std::string read_file(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path sidecar_path(const fs::path& header)
{
    return header.string() + ".f64";
}

void write_field(const fs::path& path, const CoefficientField& f, bool pure_json)
{
    json h{{"format", "mfzoo-field-v1"}, {"max_depth", f.max_depth()}, {"meta", f.meta()}};
    if (pure_json) {
        if (f.max_depth() > 12)
            throw DomainError("pure JSON fields are limited to depth 12");
        json levels = json::array();
        for (int j = 0; j <= f.max_depth(); ++j) {
            const auto lv = f.level(j);
            levels.push_back(std::vector<double>(lv.begin(), lv.end()));
        }
        h["levels"] = std::move(levels);
        atomic_write(path, h.dump() + "\n");
        return;
    }
    std::string payload;
    payload.reserve(8 * (std::size_t{2} << f.max_depth()));
    for (int j = 0; j <= f.max_depth(); ++j)
        payload += pack(f.level(j));
    write_with_sidecar(path, std::move(h), payload);
}

CoefficientField read_field(const fs::path& path)
{
    const json h = read_header(path, "mfzoo-field-v1");
    const int J = field_of<int>(h, "max_depth", path);
    if (J < 0 || J > 30)
        throw FormatError(path.string() + ": max_depth out of range");
    const json meta = h.value("meta", json::object());
    std::vector<std::vector<double>> levels;
    if (h.contains("levels")) {
        if (J > 12)
            throw FormatError(path.string() + ": pure JSON variant is limited to depth 12");
        levels = field_of<std::vector<std::vector<double>>>(h, "levels", path);
    } else {
        const auto all = get_f64(read_payload(path, h), (std::size_t{2} << J) - 1, path);
        std::size_t at = 0;
        for (int j = 0; j <= J; ++j) {
            levels.emplace_back(all.begin() + at, all.begin() + at + pow2u(j));
            at += pow2u(j);
        }
    }
    try {
        return CoefficientField(J, std::move(levels), meta);
    } catch (const DomainError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_grid(const fs::path& path, const GridFunction& g)
{
    write_with_sidecar(path, {{"format", "mfzoo-grid-v1"}, {"depth", g.depth}}, pack(g.values));
}

GridFunction read_grid(const fs::path& path)
{
    const json h = read_header(path, "mfzoo-grid-v1");
    const int J = field_of<int>(h, "depth", path);
    if (J < 0 || J > 30)
        throw FormatError(path.string() + ": depth out of range");
    return GridFunction(J, get_f64(read_payload(path, h), pow2u(J), path));
}

void write_trig(const fs::path& path, const TrigPolynomial& p)
{
    json h{{"format", "mfzoo-trig-v1"}, {"n_min", p.n_min}, {"n_max", p.n_max()}, {"real", p.real}};
    write_with_sidecar(path, std::move(h), pack(p.coeffs));
}

TrigPolynomial read_trig(const fs::path& path)
{
    const json h = read_header(path, "mfzoo-trig-v1");
    TrigPolynomial p;
    p.n_min = field_of<std::int64_t>(h, "n_min", path);
    const auto n_max = field_of<std::int64_t>(h, "n_max", path);
    p.real = h.value("real", false);
    if (n_max < p.n_min - 1)
        throw FormatError(path.string() + ": n_max below n_min");
    p.coeffs = unpack_pairs(read_payload(path, h), static_cast<std::size_t>(n_max - p.n_min + 1), path);
    return p;
}

void write_block_function(const fs::path& path, const BlockFunction& f)
{
    json blocks = json::array();
    for (std::size_t i = 0; i < f.blocks.size(); ++i) {
        const auto& b = f.blocks[i];
        const fs::path bp = path.string() + ".b" + std::to_string(i) + ".trig";
        write_trig(bp, b.Q);
        blocks.push_back({{"k", b.k},
                          {"weight", b.weight},
                          {"channel", b.channel == Channel::real ? "real" : "imaginary"},
                          {"file", bp.filename().string()}});
    }
    json h{{"format", "mfzoo-blocks-v1"},
           {"schedule", schedule_json(f.schedule)},
           {"constant", {f.constant.real(), f.constant.imag()}},
           {"blocks", std::move(blocks)}};
    atomic_write(path, h.dump(2) + "\n");
}

BlockFunction read_block_function(const fs::path& path)
{
    const json h = read_header(path, "mfzoo-blocks-v1");
    BlockFunction f;
    f.schedule = schedule_from(h.at("schedule"), path);
    const auto c = field_of<std::vector<double>>(h, "constant", path);
    if (c.size() != 2)
        throw FormatError(path.string() + ": constant must be [re, im]");
    f.constant = {c[0], c[1]};
    for (const auto& jb : field_of<json>(h, "blocks", path)) {
        Block b;
        b.k = field_of<int>(jb, "k", path);
        b.weight = field_of<double>(jb, "weight", path);
        const auto ch = field_of<std::string>(jb, "channel", path);
        if (ch != "real" && ch != "imaginary")
            throw FormatError(path.string() + ": unknown channel " + ch);
        b.channel = ch == "real" ? Channel::real : Channel::imaginary;
        b.Q = read_trig(path.parent_path() / field_of<std::string>(jb, "file", path));
        f.blocks.push_back(std::move(b));
    }
    return f;
}

void write_ds(const fs::path& path, const DirichletSeries& g)
{
    write_with_sidecar(path, {{"format", "mfzoo-ds-v1"}, {"n_max", g.n_max()}}, pack(g.a));
}

DirichletSeries read_ds(const fs::path& path)
{
    const json h = read_header(path, "mfzoo-ds-v1");
    const auto n = field_of<std::int64_t>(h, "n_max", path);
    if (n < 0)
        throw FormatError(path.string() + ": negative n_max");
    return DirichletSeries{unpack_pairs(read_payload(path, h), static_cast<std::size_t>(n), path)};
}

void write_halfline(const fs::path& path, const HalfLineFunction& F)
{
    const char* layout = F.layout == Layout::unit ? "unit" : F.layout == Layout::log ? "log" : "general";
    json h{{"format", "mfzoo-halfline-v1"}, {"layout", layout}, {"breakpoints", F.breaks}};
    write_with_sidecar(path, std::move(h), pack(F.values));
}

HalfLineFunction read_halfline(const fs::path& path)
{
    const json h = read_header(path, "mfzoo-halfline-v1");
    auto breaks = field_of<std::vector<double>>(h, "breakpoints", path);
    if (breaks.empty())
        throw FormatError(path.string() + ": no breakpoints");
    auto values = unpack_pairs(read_payload(path, h), breaks.size() - 1, path);
    const auto layout = field_of<std::string>(h, "layout", path);
    HalfLineFunction F;
    try {
        F = HalfLineFunction::general(std::move(breaks), std::move(values));
    } catch (const DomainError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (layout == "unit")
        F.layout = Layout::unit;
    else if (layout == "log")
        F.layout = Layout::log;
    else if (layout != "general")
        throw FormatError(path.string() + ": unknown layout " + layout);
    return F;
}

std::string sniff_format(const fs::path& path)
{
    try {
        const json h = json::parse(read_file(path));
        return h.is_object() ? h.value("format", "") : "";
    } catch (const json::exception&) {
        return "";
    }
}

SpectrumReport read_spectrum_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "abscissa,dim_estimate,r2,levels_used,flag")
        throw FormatError("spectrum CSV header mismatch");
    SpectrumReport rep;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ','))
            cells.push_back(c);
        if (cells.size() != 5)
            throw FormatError("spectrum CSV row needs 5 cells: " + line);
        SpectrumRow r;
        try {
            r.abscissa = std::stod(cells[0]);
            r.dimension = cells[1] == "nan" ? NAN : std::stod(cells[1]);
            r.r2 = cells[2] == "nan" ? NAN : std::stod(cells[2]);
            r.levels_used = std::stoi(cells[3]);
        } catch (const std::exception&) {
            throw FormatError("bad number in spectrum CSV row: " + line);
        }
        r.flag = cells[4];
        r.model = NAN;
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

} // namespace mfzoo
