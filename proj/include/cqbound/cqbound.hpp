#pragma once

// Worst-case output-size bounds for conjunctive queries under functional
// dependencies: entropy LPs, the color number, sparsity preservation, and
// worst-case instance generation.

#include "chase.hpp"
#include "coloring.hpp"
#include "database.hpp"
#include "entropy.hpp"
#include "error.hpp"
#include "evaluator.hpp"
#include "instance_gen.hpp"
#include "io.hpp"
#include "parser.hpp"
#include "query.hpp"
#include "rational.hpp"
#include "simplex.hpp"
#include "size_bound.hpp"
#include "sparsity.hpp"
