// Copyright The morbench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "morbench/errors.hpp"
#include "morbench/gramians.hpp"
#include "morbench/harness/config.hpp"
#include "morbench/harness/emit.hpp"
#include "morbench/harness/experiment.hpp"
#include "morbench/harness/sampling.hpp"
#include "morbench/matrix_market.hpp"
#include "morbench/morscore.hpp"
#include "morbench/norms.hpp"
#include "morbench/reducers.hpp"
#include "morbench/system.hpp"
#include "morbench/thermal_block.hpp"
