#pragma once

// Umbrella header.

#include "relabel/distance.hpp"
#include "relabel/errors.hpp"
#include "relabel/generator.hpp"
#include "relabel/graph.hpp"
#include "relabel/harmonic.hpp"
#include "relabel/io.hpp"
#include "relabel/logic.hpp"
#include "relabel/metrics.hpp"
#include "relabel/partition.hpp"
#include "relabel/supervision.hpp"
