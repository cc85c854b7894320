#pragma once

// Umbrella header: the whole key-point sequence codec library.

#include "kpsc/bitio.hpp"
#include "kpsc/model.hpp"
#include "kpsc/predict.hpp"
#include "kpsc/modesel.hpp"
#include "kpsc/codec.hpp"
#include "kpsc/ingest.hpp"
#include "kpsc/bench.hpp"
