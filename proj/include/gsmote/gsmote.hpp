#pragma once

#include "gsmote/benchmark.hpp"
#include "gsmote/classifiers.hpp"
#include "gsmote/csv.hpp"
#include "gsmote/dataset.hpp"
#include "gsmote/evaluation.hpp"
#include "gsmote/fixtures.hpp"
#include "gsmote/geometry.hpp"
#include "gsmote/matrix.hpp"
#include "gsmote/metrics.hpp"
#include "gsmote/neighbors.hpp"
#include "gsmote/oversampling.hpp"
#include "gsmote/rng.hpp"
#include "gsmote/stats.hpp"
