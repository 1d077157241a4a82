#pragma once

// Text formats. Every floating-point value is written in the shortest form
// that parses back to the identical double.
//
// Field file:
//   # nlslab-field N=<int> rmax=<real> nodes=<int>
//   <r> <Re u> <Im u>          one line per node, in grid order
// Lines starting with '#' after the header and blank lines are ignored.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlslab/evolver.hpp"
#include "nlslab/radial.hpp"

namespace nlslab {

std::string format_double(double v);

/// Parses a full-precision double; throws ParseError naming path and line.
double parse_double(std::string_view text, const std::string& path, std::size_t line);

void save_field(const RadialField& u, const std::filesystem::path& path);
RadialField load_field(const std::filesystem::path& path);

/// Two-column (r, |u|) file for plotting.
void write_profile(const RadialField& u, const std::filesystem::path& path);

/// CSV with a header row of sample_columns().
void write_samples_csv(std::span<const Sample> samples, const std::filesystem::path& path);
std::vector<Sample> read_samples_csv(const std::filesystem::path& path);

/// One two-column (t, value) file per diagnostic column, named <column>.dat.
void write_series(std::span<const Sample> samples, const std::filesystem::path& directory);

/// Writes text to a file, replacing it; throws Error(io) with the path.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace nlslab
