#pragma once

// Shared test volumes, including the frozen constructed metric case.

#include "medroi/phantom.hpp"
#include "medroi/types.hpp"

namespace fixture {

// ref = (7x + 13y + 5z) mod 17, test = ref + ((3x + 5y + z) mod 5) - 2 on
// a 16x14x3 grid; reference values computed offline with scikit-image.
inline std::pair<medroi::Volume, medroi::Volume> constructed_pair() {
  using medroi::Volume;
  Volume ref = Volume::zeros({16, 14, 3}, medroi::Dtype::I16);
  Volume test = ref;
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 14; ++y)
      for (int x = 0; x < 16; ++x) {
        const float r = static_cast<float>((x * 7 + y * 13 + z * 5) % 17);
        ref.at(x, y, z) = r;
        test.at(x, y, z) = r + static_cast<float>((x * 3 + y * 5 + z) % 5) - 2.0f;
      }
  return {ref, test};
}

inline medroi::Volume phantom(std::uint64_t seed, medroi::Dims dims = {48, 48, 32},
                              double tissue_fraction = 0.5, double noise = 0.0) {
  medroi::PhantomSpec s;
  s.seed = seed;
  s.dims = dims;
  s.tissue_fraction = tissue_fraction;
  s.noise_amplitude = noise;
  return medroi::generate_phantom(s);
}

}  // namespace fixture
