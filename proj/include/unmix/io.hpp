#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "unmix/experiment.hpp"
#include "unmix/histogram.hpp"
#include "unmix/sampler.hpp"
#include "unmix/types.hpp"

namespace unmix {

// Library interchange format:
//   wavelength,<name_1>,...,<name_R>
//   <wavelength>,<reflectance_1>,...,<reflectance_R>   (one row per band)
// Trailing blank lines are tolerated; nothing else is.
EndmemberLibrary parse_library(std::istream& in);
EndmemberLibrary parse_library(const std::string& text);
EndmemberLibrary load_library_file(const std::string& path);

std::string write_library(const EndmemberLibrary& lib);

// Pixel format: header "band,wavelength,reflectance", one row per band,
// band indices 1..L in order.
struct PixelFile {
  std::vector<double> wavelengths;
  PixelObservation pixel;
};

PixelFile parse_pixel_csv(std::istream& in);
PixelFile parse_pixel_csv(const std::string& text);
PixelFile load_pixel_file(const std::string& path);
std::string write_pixel_csv(const std::vector<double>& wavelengths,
                            const std::vector<double>& reflectance);

// Flat key=value configuration; '#' starts a comment. Unknown keys are an
// error. Recognized keys (defaults in parentheses): beta (0.5), gamma (1),
// nu (0.01), n_iter (10000), burn_in (1000), n_runs (20), noise_sigma
// (0.05), seed (42), true_a (0.3,0.7,0,0,0,0), true_b (0.2),
// proposal_step (0.05). The returned scenario carries an empty library;
// the caller supplies one.
std::pair<SyntheticScenario, SamplerConfig> load_config(const std::string& text);
std::pair<SyntheticScenario, SamplerConfig> load_config_file(const std::string& path);

// Output CSVs.
std::string write_histogram_csv(const Histogram& hist);           // bin_left,bin_right,count
std::string write_trace_csv(const Chain& chain);                  // iteration,a1..aR,b,sigma2,sigma_b2

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace unmix
