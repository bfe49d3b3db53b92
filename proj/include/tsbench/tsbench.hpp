#pragma once

/// Umbrella header for the whole library.

#include "data.hpp"
#include "distances.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "measure_spec.hpp"
#include "representations.hpp"
#include "scan.hpp"
#include "tlb.hpp"
#include "util.hpp"
