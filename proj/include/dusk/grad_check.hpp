#pragma once

#include <functional>

#include "dusk/param_store.hpp"
#include "dusk/tape.hpp"

namespace dusk {

// Builds a scalar loss on a fresh tape attached to the store. Must be a pure
// function of the current store contents.
using LossBuilder = std::function<Tape::Id(Tape&)>;

// Compares reverse-mode gradients against central finite differences on up to
// max_coords_per_block sampled coordinates of every trainable block. Returns
// the maximum of |analytic - fd| / max(denom_floor, |analytic| + |fd|).
// Central differences cannot resolve gradients below roughly
// loss * machine_eps / eps; raise denom_floor above that scale so such
// coordinates are held to a tight absolute tolerance instead.
real grad_check(ParameterStore& store, const LossBuilder& build, real eps,
                int max_coords_per_block = 24, uint64_t seed = 7,
                real denom_floor = real(1e-12));

}  // namespace dusk
