#pragma once

#include "dsim/core/clock.hpp"
#include "dsim/core/errors.hpp"
#include "dsim/core/rng.hpp"
#include "dsim/demographics.hpp"
#include "dsim/finance.hpp"
#include "dsim/genesis.hpp"
#include "dsim/montecarlo/replication.hpp"
#include "dsim/montecarlo/report.hpp"
#include "dsim/montecarlo/simulation.hpp"
#include "dsim/scenario/config.hpp"
#include "dsim/scenario/presets.hpp"
#include "dsim/scenario/reweight.hpp"
#include "dsim/scenario/scenario.hpp"
#include "dsim/selection.hpp"
#include "dsim/types.hpp"
