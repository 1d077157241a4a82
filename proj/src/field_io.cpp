#include "nlslab/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlslab/error.hpp"

namespace nlslab {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCategory::io, path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, path.string() + ": cannot open for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, path.string() + ": cannot open for reading");
  return in;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCategory::io, path.string() + ": write failed");
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& path, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ParseError(path, line, "expected a number, found '" + std::string(text) + "'");
  }
  return v;
}

void save_field(const RadialField& u, const fs::path& path) {
  auto out = open_out(path);
  const RadialGrid& g = u.grid();
  out << "# nlslab-field N=" << g.dimension() << " rmax=" << format_double(g.r_max()) << " nodes=" << g.size() << '\n';
  for (std::size_t i = 0; i < u.size(); ++i) {
    out << format_double(g.node(i)) << ' ' << format_double(u[i].real()) << ' ' << format_double(u[i].imag()) << '\n';
  }
  finish(out, path);
}

RadialField load_field(const fs::path& path) {
  auto in = open_in(path);
  const std::string name = path.string();
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(name, 1, "empty file");
  ++lineno;
  const auto head = split_ws(line);
  if (head.size() != 5 || head[0] != "#" || head[1] != "nlslab-field") {
    throw ParseError(name, lineno, "expected header '# nlslab-field N=<int> rmax=<real> nodes=<int>'");
  }
  int dimension = 0;
  double r_max = 0.0;
  std::size_t nodes = 0;
  auto value_of = [&](std::string_view tok, std::string_view key) {
    if (tok.substr(0, key.size()) != key) {
      throw ParseError(name, lineno, "expected '" + std::string(key) + "' in header");
    }
    return tok.substr(key.size());
  };
  {
    const auto n_text = value_of(head[2], "N=");
    const auto res = std::from_chars(n_text.data(), n_text.data() + n_text.size(), dimension);
    if (res.ec != std::errc{} || res.ptr != n_text.data() + n_text.size() || dimension < 1) {
      throw ParseError(name, lineno, "invalid dimension '" + std::string(n_text) + "'");
    }
    r_max = parse_double(value_of(head[3], "rmax="), name, lineno);
    const auto m_text = value_of(head[4], "nodes=");
    const auto res2 = std::from_chars(m_text.data(), m_text.data() + m_text.size(), nodes);
    if (res2.ec != std::errc{} || res2.ptr != m_text.data() + m_text.size() || nodes < 2) {
      throw ParseError(name, lineno, "invalid node count '" + std::string(m_text) + "'");
    }
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ParseError(name, lineno, "rmax must be positive");
  }

  auto grid = make_grid(dimension, r_max, nodes);
  std::vector<cplx> values;
  values.reserve(nodes);
  const double tol = 1e-9 * r_max;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok.size() != 3) throw ParseError(name, lineno, "expected 3 columns (r re im), found " + std::to_string(tok.size()));
    if (values.size() == nodes) throw ParseError(name, lineno, "more samples than the " + std::to_string(nodes) + " declared");
    const double r = parse_double(tok[0], name, lineno);
    if (std::abs(r - grid->node(values.size())) > tol) {
      throw ParseError(name, lineno, "radius " + std::string(tok[0]) + " is not node " + std::to_string(values.size()) +
                                         " of the uniform grid");
    }
    const double re = parse_double(tok[1], name, lineno);
    const double im = parse_double(tok[2], name, lineno);
    values.emplace_back(re, im);
  }
  if (values.size() != nodes) {
    throw ParseError(name, lineno, "found " + std::to_string(values.size()) + " samples, header declares " +
                                       std::to_string(nodes));
  }
  return RadialField(std::move(grid), std::move(values));
}

void write_profile(const RadialField& u, const fs::path& path) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < u.size(); ++i) {
    out << format_double(u.grid().node(i)) << ' ' << format_double(std::abs(u[i])) << '\n';
  }
  finish(out, path);
}

void write_samples_csv(std::span<const Sample> samples, const fs::path& path) {
  auto out = open_out(path);
  const auto& cols = sample_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const auto& s : samples) {
    const auto row = sample_row(s);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  finish(out, path);
}

std::vector<Sample> read_samples_csv(const fs::path& path) {
  auto in = open_in(path);
  const std::string name = path.string();
  const auto& cols = sample_columns();
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(name, 1, "empty file");
  {
    std::string expected;
    for (std::size_t c = 0; c < cols.size(); ++c) expected += (c ? "," : "") + cols[c];
    if (line != expected) throw ParseError(name, 1, "unexpected header");
  }
  std::vector<Sample> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.push_back(parse_double(std::string_view(line).substr(start, comma - start), name, lineno));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != cols.size()) throw ParseError(name, lineno, "expected " + std::to_string(cols.size()) + " columns");
    Sample s;
    s.t = row[0];
    s.mass = row[1];
    s.energy = row[2];
    s.grad_sq = row[3];
    s.l4_pow = row[4];
    s.lp1_pow = row[5];
    s.product_grad = row[6];
    s.virial_rhs = row[7];
    s.local_variance = row[8];
    s.local_virial_rhs = row[9];
    s.strichartz_accum = row[10];
    s.dt = row[11];
    s.nodes = static_cast<std::size_t>(row[12]);
    s.max_amplitude = row[13];
    out.push_back(s);
  }
  return out;
}

void write_series(std::span<const Sample> samples, const fs::path& directory) {
  const auto& cols = sample_columns();
  std::vector<std::ostringstream> streams(cols.size());
  for (const auto& s : samples) {
    const auto row = sample_row(s);
    for (std::size_t c = 1; c < cols.size(); ++c) {
      streams[c] << format_double(s.t) << ' ' << format_double(row[c]) << '\n';
    }
  }
  for (std::size_t c = 1; c < cols.size(); ++c) write_text(directory / (cols[c] + ".dat"), streams[c].str());
}

void write_text(const fs::path& path, std::string_view text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nlslab
