#pragma once

#include "error.hpp"
#include "grid.hpp"
#include "synth.hpp"
#include "sparse.hpp"
#include "assemble.hpp"
#include "precond.hpp"
#include "solver.hpp"
#include "metrics.hpp"
#include "io.hpp"
#include "bench.hpp"
