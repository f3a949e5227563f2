#pragma once

#include "twave/errors.hpp"
#include "twave/model.hpp"
#include "twave/montecarlo.hpp"
#include "twave/pde.hpp"
#include "twave/value.hpp"
#include "twave/wave.hpp"
