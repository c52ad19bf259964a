#pragma once

#include "flowsched/distributed_routing.hpp"
#include "flowsched/dsee_learning.hpp"
#include "flowsched/error.hpp"
#include "flowsched/instance_sampler.hpp"
#include "flowsched/network_model.hpp"
#include "flowsched/parallel.hpp"
#include "flowsched/paths.hpp"
#include "flowsched/poa_analysis.hpp"
#include "flowsched/poa_study.hpp"
#include "flowsched/pricing.hpp"
#include "flowsched/random.hpp"
#include "flowsched/regret_harness.hpp"
#include "flowsched/virtual_game.hpp"
