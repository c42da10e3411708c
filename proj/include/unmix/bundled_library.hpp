#pragma once

#include "unmix/types.hpp"

namespace unmix {

// Deterministic synthetic 224-band, 6-endmember reflectance library
// covering 0.4-2.5 micrometers. Stands in for an instrument library in
// the synthetic experiments; user libraries load through parse_library.
EndmemberLibrary bundled_library();

}  // namespace unmix
