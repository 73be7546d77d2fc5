#pragma once

#include "mpnn_lab/errors.hpp"
#include "mpnn_lab/rng.hpp"
#include "mpnn_lab/space.hpp"
#include "mpnn_lab/quadrature.hpp"
#include "mpnn_lab/kernel.hpp"
#include "mpnn_lab/linalg.hpp"
#include "mpnn_lab/signal.hpp"
#include "mpnn_lab/parallel.hpp"
#include "mpnn_lab/graph.hpp"
#include "mpnn_lab/mlp.hpp"
#include "mpnn_lab/mpnn.hpp"
#include "mpnn_lab/cmpnn.hpp"
#include "mpnn_lab/metrics.hpp"
#include "mpnn_lab/bounds.hpp"
#include "mpnn_lab/experiments.hpp"
#include "mpnn_lab/io.hpp"
#include "mpnn_lab/config.hpp"
