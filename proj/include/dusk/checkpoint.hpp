#pragma once

#include <cstdint>
#include <string>

#include "dusk/param_store.hpp"

namespace dusk {

// Versioned binary dump of every parameter block (name, shape, trainable
// flag, raw scalars) plus the iteration counter. Round-trips bit-exactly.
void save_checkpoint(const ParameterStore& store, uint64_t iteration,
                     const std::string& path);

// Loads into `store`. Blocks are created if the store is empty; otherwise
// names and shapes must match the file exactly.
uint64_t load_checkpoint(ParameterStore& store, const std::string& path);

}  // namespace dusk
