#pragma once

// Umbrella header for the modumech library.

#include "modumech/circuit.hpp"
#include "modumech/common.hpp"
#include "modumech/control.hpp"
#include "modumech/dynamics.hpp"
#include "modumech/fock.hpp"
#include "modumech/modulation.hpp"
