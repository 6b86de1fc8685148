#pragma once

#include <gwcalc/combinatorics.hpp>
#include <gwcalc/complex_solver.hpp>
#include <gwcalc/graded_algebra.hpp>
#include <gwcalc/invariant_store.hpp>
#include <gwcalc/linear_solver.hpp>
#include <gwcalc/potentials.hpp>
#include <gwcalc/rational.hpp>
#include <gwcalc/real_solver.hpp>
#include <gwcalc/verify.hpp>
