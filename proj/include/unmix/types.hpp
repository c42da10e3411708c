#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace unmix {

// Abundance fractions on the simplex: nonnegative, summing to one.
using AbundanceVector = std::vector<double>;

inline constexpr double kSimplexSumTol = 1e-12;

// Lower floor applied to every abundance coordinate inside the sampler.
// Keeps the sparse-Dirichlet log density finite at the boundary.
inline constexpr double kAbundanceFloor = 1e-10;

inline constexpr std::uint64_t kDefaultSeed = 42;

// Endmember reflectance spectra: L bands (rows) x R endmembers (columns),
// stored row-major so one band is contiguous.
struct EndmemberLibrary {
  std::vector<double> wavelengths;   // L, micrometers, strictly increasing
  std::vector<double> spectra;       // L*R reflectances in [0,1]
  std::vector<std::string> names;    // R labels

  int bands() const { return static_cast<int>(wavelengths.size()); }
  int endmembers() const { return static_cast<int>(names.size()); }
  double at(int band, int endmember) const {
    return spectra[static_cast<std::size_t>(band) * names.size() + endmember];
  }

  // Throws ValidationError on any invariant violation.
  void validate() const;
};

// One observed mixed pixel.
struct PixelObservation {
  std::vector<double> reflectance;  // length L, finite

  int bands() const { return static_cast<int>(reflectance.size()); }
};

struct PriorHyperparams {
  double beta = 0.5;   // Dirichlet concentration; < 1 is sparsity-inducing
  double gamma = 1.0;  // Inverse-Gamma shape on sigma_b^2
  double nu = 0.01;    // Inverse-Gamma scale on sigma_b^2

  void validate() const;
};

// Full unknown state {a, b, sigma^2, sigma_b^2}.
struct ModelParams {
  AbundanceVector abundance;
  double b = 0.0;
  double sigma2 = 1.0;
  double sigma_b2 = 1.0;
};

// Throws ValidationError unless `a` is on the simplex.
void validate_abundance(const AbundanceVector& a);

}  // namespace unmix
