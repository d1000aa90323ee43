#pragma once

// Umbrella header for the class-probability Bayesian optimization library.

#include "cpbo/acquisition.hpp"
#include "cpbo/bench.hpp"
#include "cpbo/config.hpp"
#include "cpbo/graph.hpp"
#include "cpbo/loop.hpp"
#include "cpbo/normal.hpp"
#include "cpbo/pool_csv.hpp"
#include "cpbo/rng.hpp"
#include "cpbo/sampling.hpp"
#include "cpbo/space.hpp"
#include "cpbo/ssl.hpp"
#include "cpbo/study.hpp"
#include "cpbo/types.hpp"
