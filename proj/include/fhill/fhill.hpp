#ifndef FHILL_FHILL_HPP
#define FHILL_FHILL_HPP

#include "diagnostics.hpp"
#include "error.hpp"
#include "estimators.hpp"
#include "martingale.hpp"
#include "moments.hpp"
#include "parallel.hpp"
#include "records.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "stats.hpp"
#include "tables.hpp"
#include "testing.hpp"
#include "weights.hpp"

#endif  // FHILL_FHILL_HPP
