#pragma once

// Umbrella header for the core library.

#include "mehler/errors.hpp"
#include "mehler/exponent.hpp"
#include "mehler/levy.hpp"
#include "mehler/matrix_exp.hpp"
#include "mehler/mehler_operator.hpp"
#include "mehler/operator_group.hpp"
#include "mehler/quadrature.hpp"
#include "mehler/random_integral.hpp"
#include "mehler/rng.hpp"
#include "mehler/stats.hpp"
#include "mehler/urbanik.hpp"
#include "mehler/version.hpp"
