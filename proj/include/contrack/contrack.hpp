#pragma once

// Level-set region tracking by gradient descent of composable energy
// functionals. Umbrella header for everything except file I/O (io.hpp,
// which needs libpng) and the validation benchmarks (bench.hpp).

#include "contrack/energy.hpp"
#include "contrack/histogram.hpp"
#include "contrack/image.hpp"
#include "contrack/levelset.hpp"
#include "contrack/metrics.hpp"
#include "contrack/synth.hpp"
#include "contrack/tracker.hpp"
