// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "remat/baselines.hpp"
#include "remat/bounds.hpp"
#include "remat/cost.hpp"
#include "remat/curves.hpp"
#include "remat/errors.hpp"
#include "remat/executor.hpp"
#include "remat/grid.hpp"
#include "remat/hetero.hpp"
#include "remat/oracle.hpp"
#include "remat/policy_io.hpp"
#include "remat/policy_table.hpp"
#include "remat/refchain.hpp"
#include "remat/replay.hpp"
#include "remat/solvers.hpp"
#include "remat/trace.hpp"
#include "remat/types.hpp"
