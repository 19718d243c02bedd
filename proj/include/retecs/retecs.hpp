#pragma once

#include "retecs/agents.hpp"
#include "retecs/baselines.hpp"
#include "retecs/config.hpp"
#include "retecs/domain.hpp"
#include "retecs/errors.hpp"
#include "retecs/evaluation.hpp"
#include "retecs/experiment.hpp"
#include "retecs/ingestion.hpp"
#include "retecs/network.hpp"
#include "retecs/report.hpp"
#include "retecs/rewards.hpp"
#include "retecs/rng.hpp"
#include "retecs/scheduler.hpp"
#include "retecs/tableau.hpp"
