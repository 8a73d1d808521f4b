#pragma once

#include "symaudit/core.hpp"
#include "symaudit/measure.hpp"
#include "symaudit/symbol.hpp"
#include "symaudit/exact_state.hpp"
#include "symaudit/rng.hpp"
#include "symaudit/simulate.hpp"
#include "symaudit/estimators.hpp"
#include "symaudit/fourier_symbol.hpp"
#include "symaudit/majorant.hpp"
#include "symaudit/ellipticity.hpp"
#include "symaudit/groenwall.hpp"
#include "symaudit/selftest.hpp"
#include "symaudit/io.hpp"
#include "symaudit/svg.hpp"

