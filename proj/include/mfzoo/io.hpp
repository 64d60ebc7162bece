#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mfzoo/dirichlet.hpp"
#include "mfzoo/dyadic.hpp"
#include "mfzoo/fourier.hpp"
#include "mfzoo/haar.hpp"

namespace mfzoo {

namespace fs = std::filesystem;

// Writes to a sibling temp file and renames. Throws IoError.
void atomic_write(const fs::path& path, const std::string& bytes);
std::string read_file(const fs::path& path);

// Binary payloads are little-endian f64 in a sidecar named <path>.f64,
// referenced from the header by file name.
fs::path sidecar_path(const fs::path& header);

// mfzoo-field-v1. pure_json embeds the levels (J <= 12 only).
void write_field(const fs::path& path, const CoefficientField& f, bool pure_json = false);
CoefficientField read_field(const fs::path& path);

// mfzoo-grid-v1.
void write_grid(const fs::path& path, const GridFunction& g);
GridFunction read_grid(const fs::path& path);

// mfzoo-trig-v1, (re, im) pairs for n_min..n_max.
void write_trig(const fs::path& path, const TrigPolynomial& p);
TrigPolynomial read_trig(const fs::path& path);

// mfzoo-blocks-v1 manifest; block i goes to <path>.b<i>.trig.
void write_block_function(const fs::path& path, const BlockFunction& f);
BlockFunction read_block_function(const fs::path& path);

// mfzoo-ds-v1.
void write_ds(const fs::path& path, const DirichletSeries& g);
DirichletSeries read_ds(const fs::path& path);

// mfzoo-halfline-v1: breakpoints in JSON, values as (re, im) pairs.
void write_halfline(const fs::path& path, const HalfLineFunction& F);
HalfLineFunction read_halfline(const fs::path& path);

// Format tag of a header file, or "" when it is not mfzoo JSON.
std::string sniff_format(const fs::path& path);

SpectrumReport read_spectrum_csv(const std::string& text);

} // namespace mfzoo
