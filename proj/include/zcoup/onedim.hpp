/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include "zcoup/transport.hpp"

namespace zcoup {

/// Closed-form zero-coupling on the line. Mass never crosses the origin:
/// on each half-line sources and targets are matched monotonically from the
/// outside in, and the innermost excess on a side goes to (or comes from)
/// the origin. The result is a minimum-cost reservoir plan.
ZeroCoupling solve_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace zcoup
