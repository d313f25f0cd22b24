#pragma once

// Umbrella header for the entanglement purification noise-threshold toolkit.

#include "entpur/analysis.hpp"
#include "entpur/channels.hpp"
#include "entpur/errors.hpp"
#include "entpur/oracle.hpp"
#include "entpur/protocol.hpp"
#include "entpur/qlinalg.hpp"
#include "entpur/states.hpp"

namespace entpur {

inline constexpr const char* kVersion = "0.1.0";

} // namespace entpur
