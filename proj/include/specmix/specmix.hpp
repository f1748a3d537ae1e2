#pragma once

#include "baselines.hpp"
#include "bench.hpp"
#include "dataset.hpp"
#include "eigensolvers.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "graph.hpp"
#include "kmeans.hpp"
#include "pipelines.hpp"
#include "random.hpp"
