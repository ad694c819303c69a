#pragma once

#include "retrodp/chain_state.hpp"
#include "retrodp/conditional_sampler.hpp"
#include "retrodp/datasets.hpp"
#include "retrodp/diagnostics.hpp"
#include "retrodp/exact_allocation.hpp"
#include "retrodp/functionals.hpp"
#include "retrodp/gaussian_model.hpp"
#include "retrodp/geweke.hpp"
#include "retrodp/neal8.hpp"
#include "retrodp/observed_partition.hpp"
#include "retrodp/plots.hpp"
#include "retrodp/rng.hpp"
#include "retrodp/runner.hpp"
#include "retrodp/stick_breaking.hpp"
#include "retrodp/trace.hpp"
