#pragma once

#include "corona/config.hpp"
#include "corona/dbar_solver.hpp"
#include "corona/field_io.hpp"
#include "corona/function_spec.hpp"
#include "corona/grid.hpp"
#include "corona/koszul.hpp"
#include "corona/oracles.hpp"
#include "corona/pipeline.hpp"
#include "corona/polynomial.hpp"
#include "corona/wirtinger.hpp"
