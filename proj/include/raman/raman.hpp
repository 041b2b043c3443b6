#pragma once

#include "atomic_structure.hpp"
#include "common.hpp"
#include "diagnostics.hpp"
#include "experiments.hpp"
#include "half_int.hpp"
#include "jump_analytic.hpp"
#include "model.hpp"
#include "output.hpp"
#include "propagate.hpp"
#include "pulse.hpp"
#include "spectral.hpp"
#include "wigner.hpp"
