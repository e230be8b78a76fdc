#pragma once

#include <cstdint>
#include <string>

#include "dusk/dataset.hpp"
#include "dusk/degrade.hpp"

namespace dusk {

struct SynthParams {
  int views = 12;
  int width = 96;
  int height = 72;
  int frames = 8;           // exposure frames per shaken view
  real shake_fraction = real(0.8);
  real gamma_d = real(2.2);
  real gain = real(0.12);
  real sigma_g = real(0.02);
  real sigma_p = real(0.01);
  real sigma_lf = 0;  // smooth per-view noise component
  int lf_cells = 6;
  real max_rot_deg = real(0.5);
  real max_trans_fraction = real(0.005);  // of the scene diameter
};

// Writes a complete ground-truthed dataset directory: degraded inputs, clean
// references, z-depth rasters, and the manifest. An orbit of cameras around
// the standard procedural scene; shake_fraction of the views get a random
// screw trajectory blended over `frames` exposures.
DatasetManifest synth_dataset(const std::string& dir, const SynthParams& params,
                              uint64_t seed);

}  // namespace dusk
