//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "divmatch/graph.hpp"
#include "divmatch/graph_io.hpp"
#include "divmatch/generators.hpp"
#include "divmatch/partition.hpp"
#include "divmatch/partition_io.hpp"
#include "divmatch/features.hpp"
#include "divmatch/embedding.hpp"
#include "divmatch/match.hpp"
#include "divmatch/diversity.hpp"
#include "divmatch/select.hpp"
#include "divmatch/queries.hpp"
#include "divmatch/pipeline.hpp"
#include "divmatch/benchmark.hpp"
