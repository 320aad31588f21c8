#pragma once

#include "asym/centrality.hpp"
#include "asym/checkpoint.hpp"
#include "asym/dataset.hpp"
#include "asym/epidemic.hpp"
#include "asym/eval.hpp"
#include "asym/features.hpp"
#include "asym/gcn.hpp"
#include "asym/generators.hpp"
#include "asym/graph.hpp"
#include "asym/metrics.hpp"
#include "asym/pipeline.hpp"
#include "asym/rng.hpp"
