// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sepcoef/common.hpp"
#include "sepcoef/concordance.hpp"
#include "sepcoef/core.hpp"
#include "sepcoef/csv.hpp"
#include "sepcoef/estimators.hpp"
#include "sepcoef/inference.hpp"
#include "sepcoef/neighbors.hpp"
#include "sepcoef/normal.hpp"
#include "sepcoef/oracles.hpp"
#include "sepcoef/parallel.hpp"
#include "sepcoef/rng.hpp"
#include "sepcoef/selection.hpp"
#include "sepcoef/simgen.hpp"
