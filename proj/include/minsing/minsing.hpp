#pragma once

#include "minsing/box_polytope.hpp"
#include "minsing/envelope.hpp"
#include "minsing/errors.hpp"
#include "minsing/fiber_integral.hpp"
#include "minsing/ns_geometry.hpp"
#include "minsing/problem_file.hpp"
#include "minsing/quadrature.hpp"
#include "minsing/rational.hpp"
#include "minsing/report.hpp"
#include "minsing/tropical_weight.hpp"
#include "minsing/vhat.hpp"
