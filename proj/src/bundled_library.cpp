#include "unmix/bundled_library.hpp"

#include <algorithm>
#include <cmath>

namespace unmix {

namespace {

double bump(double x, double center, double width) {
  const double t = (x - center) / width;
  return std::exp(-t * t);
}

}  // namespace

EndmemberLibrary bundled_library() {
  constexpr int kBands = 224;
  constexpr double kLo = 0.4;   // micrometers
  constexpr double kHi = 2.5;

  EndmemberLibrary lib;
  lib.names = {"EM1", "EM2", "EM3", "EM4", "EM5", "EM6"};
  const int R = lib.endmembers();
  lib.wavelengths.resize(kBands);
  lib.spectra.resize(static_cast<std::size_t>(kBands) * R);

  // Each endmember dominates its own spectral zone, the way distinct
  // materials do; weak secondary features keep the columns from being
  // orthogonal bump functions. Condition number of M'M is about 4.
  for (int l = 0; l < kBands; ++l) {
    const double w = kLo + l * (kHi - kLo) / (kBands - 1);
    lib.wavelengths[l] = w;
    double* row = &lib.spectra[static_cast<std::size_t>(l) * R];
    row[0] = 0.06 + 0.80 * bump(w, 0.55, 0.14) + 0.10 * bump(w, 1.60, 0.30);
    row[1] = 0.05 + 0.85 * bump(w, 0.92, 0.16);
    row[2] = 0.08 + 0.75 * bump(w, 1.28, 0.15) + 0.08 * bump(w, 2.30, 0.20);
    row[3] = 0.04 + 0.82 * bump(w, 1.66, 0.17);
    row[4] = 0.07 + 0.78 * bump(w, 2.02, 0.16);
    row[5] = 0.05 + 0.80 * bump(w, 2.38, 0.15) + 0.06 * bump(w, 0.70, 0.20);
    for (int r = 0; r < R; ++r) row[r] = std::clamp(row[r], 0.0, 1.0);
  }
  return lib;
}

}  // namespace unmix
