#include "unmix/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "unmix/errors.hpp"

namespace unmix {

namespace {

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double_field(const std::string& field, int line, const std::string& what) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("cannot parse " + what + " from '" + field + "'", line);
  return v;
}

long long parse_int_field(const std::string& field, int line, const std::string& what) {
  long long v = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("cannot parse " + what + " from '" + field + "'", line);
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

EndmemberLibrary parse_library(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty library file", 1);
  line = strip_cr(line);
  std::vector<std::string> header = split_csv(line);
  if (header.size() < 3 || header[0] != "wavelength")
    throw ParseError("header must be 'wavelength,<name_1>,...,<name_R>' with R >= 2", 1);
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].empty()) throw ParseError("empty endmember name in header", 1);
  }

  EndmemberLibrary lib;
  lib.names.assign(header.begin() + 1, header.end());
  const std::size_t R = lib.names.size();

  int lineno = 1;
  bool seen_blank = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) {
      seen_blank = true;
      continue;
    }
    if (seen_blank) throw ParseError("blank line inside data section", lineno);
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != R + 1)
      throw ParseError("expected " + std::to_string(R + 1) + " fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    const double w = parse_double_field(fields[0], lineno, "wavelength");
    if (!std::isfinite(w)) throw ParseError("non-finite wavelength", lineno);
    if (!lib.wavelengths.empty() && !(w > lib.wavelengths.back()))
      throw ParseError("wavelengths must be strictly increasing", lineno);
    lib.wavelengths.push_back(w);
    for (std::size_t r = 0; r < R; ++r) {
      const double v = parse_double_field(fields[r + 1], lineno, "reflectance");
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw ParseError("reflectance out of [0,1] in column " + std::to_string(r + 2),
                         lineno);
      lib.spectra.push_back(v);
    }
  }
  if (lib.wavelengths.size() < 2) throw ParseError("library needs at least 2 data rows");
  lib.validate();
  return lib;
}

EndmemberLibrary parse_library(const std::string& text) {
  std::istringstream in(text);
  return parse_library(in);
}

EndmemberLibrary load_library_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open library file '" + path + "'");
  return parse_library(in);
}

std::string write_library(const EndmemberLibrary& lib) {
  lib.validate();
  std::string out = "wavelength";
  for (const std::string& n : lib.names) {
    out += ',';
    out += n;
  }
  out += '\n';
  const int R = lib.endmembers();
  for (int l = 0; l < lib.bands(); ++l) {
    out += format_double(lib.wavelengths[l]);
    for (int r = 0; r < R; ++r) {
      out += ',';
      out += format_double(lib.at(l, r));
    }
    out += '\n';
  }
  return out;
}

PixelFile parse_pixel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty pixel file", 1);
  if (strip_cr(line) != "band,wavelength,reflectance")
    throw ParseError("header must be 'band,wavelength,reflectance'", 1);

  PixelFile out;
  int lineno = 1;
  bool seen_blank = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) {
      seen_blank = true;
      continue;
    }
    if (seen_blank) throw ParseError("blank line inside data section", lineno);
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 3)
      throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), lineno);
    const long long band = parse_int_field(fields[0], lineno, "band index");
    if (band != static_cast<long long>(out.pixel.reflectance.size()) + 1)
      throw ParseError("band indices must run 1..L in order", lineno);
    const double w = parse_double_field(fields[1], lineno, "wavelength");
    const double v = parse_double_field(fields[2], lineno, "reflectance");
    if (!std::isfinite(w) || !std::isfinite(v))
      throw ParseError("non-finite value", lineno);
    out.wavelengths.push_back(w);
    out.pixel.reflectance.push_back(v);
  }
  if (out.pixel.reflectance.empty()) throw ParseError("pixel file has no data rows");
  return out;
}

PixelFile parse_pixel_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_pixel_csv(in);
}

PixelFile load_pixel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pixel file '" + path + "'");
  return parse_pixel_csv(in);
}

std::string write_pixel_csv(const std::vector<double>& wavelengths,
                            const std::vector<double>& reflectance) {
  if (wavelengths.size() != reflectance.size())
    throw std::invalid_argument("wavelength/reflectance length mismatch");
  std::string out = "band,wavelength,reflectance\n";
  for (std::size_t l = 0; l < reflectance.size(); ++l) {
    out += std::to_string(l + 1);
    out += ',';
    out += format_double(wavelengths[l]);
    out += ',';
    out += format_double(reflectance[l]);
    out += '\n';
  }
  return out;
}

namespace {

struct ConfigSetter {
  virtual ~ConfigSetter() = default;
  virtual void set(const std::string& value, SyntheticScenario& sc, SamplerConfig& cfg) const = 0;
};

double parse_config_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("key '" + key + "': cannot parse number from '" + value + "'");
  return v;
}

long long parse_config_int(const std::string& key, const std::string& value) {
  long long v = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("key '" + key + "': cannot parse integer from '" + value + "'");
  return v;
}

void require(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) throw ParseError("key '" + key + "': value must be " + constraint);
}

}  // namespace

std::pair<SyntheticScenario, SamplerConfig> load_config(const std::string& text) {
  SyntheticScenario sc;
  sc.library = EndmemberLibrary{};  // supplied by the caller
  SamplerConfig cfg;

  static const std::set<std::string> known = {
      "beta",   "gamma",  "nu",     "n_iter",      "burn_in", "n_runs",
      "noise_sigma", "seed", "true_a", "true_b", "proposal_step"};

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_cr(raw);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known.count(key)) throw ParseError("unknown key '" + key + "'", lineno);
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", lineno);

    if (key == "beta") {
      cfg.hyper.beta = parse_config_double(key, value);
      require(cfg.hyper.beta > 0.0, key, "> 0");
    } else if (key == "gamma") {
      cfg.hyper.gamma = parse_config_double(key, value);
      require(cfg.hyper.gamma > 0.0, key, "> 0");
    } else if (key == "nu") {
      cfg.hyper.nu = parse_config_double(key, value);
      require(cfg.hyper.nu > 0.0, key, "> 0");
    } else if (key == "n_iter") {
      const long long v = parse_config_int(key, value);
      require(v >= 1, key, ">= 1");
      cfg.n_iter = static_cast<int>(v);
    } else if (key == "burn_in") {
      const long long v = parse_config_int(key, value);
      require(v >= 0, key, ">= 0");
      cfg.burn_in = static_cast<int>(v);
    } else if (key == "n_runs") {
      const long long v = parse_config_int(key, value);
      require(v >= 1, key, ">= 1");
      sc.n_runs = static_cast<int>(v);
    } else if (key == "noise_sigma") {
      sc.noise_sigma = parse_config_double(key, value);
      require(sc.noise_sigma >= 0.0, key, ">= 0");
    } else if (key == "seed") {
      const long long v = parse_config_int(key, value);
      require(v >= 0, key, ">= 0");
      sc.seed = static_cast<std::uint64_t>(v);
      cfg.seed = sc.seed;
    } else if (key == "true_a") {
      AbundanceVector a;
      for (const std::string& f : split_csv(value))
        a.push_back(parse_config_double(key, trim(f)));
      try {
        validate_abundance(a);
      } catch (const ValidationError& e) {
        throw ParseError("key 'true_a': " + std::string(e.what()));
      }
      sc.true_abundance = std::move(a);
    } else if (key == "true_b") {
      sc.true_b = parse_config_double(key, value);
    } else if (key == "proposal_step") {
      cfg.proposal_step = parse_config_double(key, value);
      require(cfg.proposal_step > 0.0, key, "> 0");
    }
  }
  if (cfg.burn_in >= cfg.n_iter)
    throw ParseError("key 'burn_in': value must be < n_iter");
  return {std::move(sc), std::move(cfg)};
}

std::pair<SyntheticScenario, SamplerConfig> load_config_file(const std::string& path) {
  return load_config(read_text_file(path));
}

std::string write_histogram_csv(const Histogram& hist) {
  std::string out = "bin_left,bin_right,count\n";
  for (int i = 0; i < hist.bins(); ++i) {
    out += format_double(hist.edges[i]);
    out += ',';
    out += format_double(hist.edges[i + 1]);
    out += ',';
    out += std::to_string(hist.counts[i]);
    out += '\n';
  }
  return out;
}

std::string write_trace_csv(const Chain& chain) {
  if (chain.samples.empty()) throw std::invalid_argument("cannot write an empty chain");
  const std::size_t R = chain.samples.front().abundance.size();
  std::string out = "iteration";
  for (std::size_t r = 1; r <= R; ++r) out += ",a" + std::to_string(r);
  out += ",b,sigma2,sigma_b2\n";
  for (std::size_t t = 0; t < chain.samples.size(); ++t) {
    const ModelParams& s = chain.samples[t];
    out += std::to_string(t + 1);
    for (std::size_t r = 0; r < R; ++r) {
      out += ',';
      out += format_double(s.abundance[r]);
    }
    out += ',';
    out += format_double(s.b);
    out += ',';
    out += format_double(s.sigma2);
    out += ',';
    out += format_double(s.sigma_b2);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace unmix
