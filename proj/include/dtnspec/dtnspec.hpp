// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dtnspec/types.hpp"
#include "dtnspec/domain.hpp"
#include "dtnspec/operator.hpp"
#include "dtnspec/oracle.hpp"
#include "dtnspec/dtn.hpp"
#include "dtnspec/extrapolation.hpp"
#include "dtnspec/limits.hpp"
#include "dtnspec/gridset.hpp"
#include "dtnspec/classify.hpp"
#include "dtnspec/quadrature.hpp"
#include "dtnspec/measures.hpp"
#include "dtnspec/config.hpp"
#include "dtnspec/report.hpp"
#include "dtnspec/sweep.hpp"
