#pragma once

/// Umbrella header: harmonic-model reduced density operators, their spectra
/// and entropies, and the length-scale inversion dualities that relate them.

#include "harmdual/errors.hpp"
#include "harmdual/model.hpp"
#include "harmdual/modes.hpp"
#include "harmdual/quadrature.hpp"
#include "harmdual/wavefunction.hpp"
#include "harmdual/rdm.hpp"
#include "harmdual/spectra.hpp"
#include "harmdual/duality.hpp"
#include "harmdual/serialize.hpp"
