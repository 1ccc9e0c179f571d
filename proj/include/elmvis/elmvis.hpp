#pragma once

// Convenience umbrella: pulls in the whole library.

#include "elmvis/common.hpp"
#include "elmvis/dataio.hpp"
#include "elmvis/elm.hpp"
#include "elmvis/eval.hpp"
#include "elmvis/incremental.hpp"
#include "elmvis/similarity.hpp"
#include "elmvis/svg.hpp"
