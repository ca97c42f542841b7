#pragma once

// Umbrella header: limiting spectral objects of banded Toeplitz matrices.

#include "btoep/common.hpp"
#include "btoep/convergence.hpp"
#include "btoep/curves.hpp"
#include "btoep/errors.hpp"
#include "btoep/io.hpp"
#include "btoep/measures.hpp"
#include "btoep/parallel.hpp"
#include "btoep/polyroots.hpp"
#include "btoep/potential.hpp"
#include "btoep/roots.hpp"
#include "btoep/symbol.hpp"
#include "btoep/toeplitz.hpp"
