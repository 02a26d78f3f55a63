#pragma once

#include "bandframe/errors.hpp"
#include "bandframe/types.hpp"
#include "bandframe/spectral_core.hpp"
#include "bandframe/matrix_kernels.hpp"
#include "bandframe/generators.hpp"
#include "bandframe/frame_analysis.hpp"
#include "bandframe/dual_synthesis.hpp"
#include "bandframe/signal_io.hpp"
#include "bandframe/sampling_engine.hpp"
