#pragma once

// Umbrella header for the whole library.

#include "septrap/adiabatic_sweep.hpp"
#include "septrap/config.hpp"
#include "septrap/constants.hpp"
#include "septrap/coulomb_coupling.hpp"
#include "septrap/fockspace.hpp"
#include "septrap/laser_ion.hpp"
#include "septrap/presets.hpp"
#include "septrap/propagate.hpp"
#include "septrap/protocol.hpp"
#include "septrap/scenario.hpp"
