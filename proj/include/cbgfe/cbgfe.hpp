#pragma once

#include "chain_io.hpp"
#include "constraints.hpp"
#include "csv.hpp"
#include "dgp.hpp"
#include "dp_prior.hpp"
#include "error.hpp"
#include "forecast.hpp"
#include "gibbs.hpp"
#include "mdd.hpp"
#include "monte_carlo.hpp"
#include "numeric.hpp"
#include "panel.hpp"
#include "parallel.hpp"
#include "partition.hpp"
#include "partition_point.hpp"
#include "random.hpp"
#include "spc_kmeans.hpp"
