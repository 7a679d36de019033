#pragma once

#include "mmavg/core.hpp"
#include "mmavg/engine/bounds.hpp"
#include "mmavg/engine/decomposition.hpp"
#include "mmavg/engine/eps_poly.hpp"
#include "mmavg/engine/field.hpp"
#include "mmavg/engine/invariants.hpp"
#include "mmavg/engine/io.hpp"
#include "mmavg/etp/compiled.hpp"
#include "mmavg/etp/frequency.hpp"
#include "mmavg/etp/io.hpp"
#include "mmavg/etp/poly.hpp"
#include "mmavg/harness/fit.hpp"
#include "mmavg/harness/records.hpp"
#include "mmavg/harness/sweep.hpp"
#include "mmavg/integrators/schemes.hpp"
#include "mmavg/integrators/solve.hpp"
#include "mmavg/models/bloch.hpp"
#include "mmavg/models/problem.hpp"
#include "mmavg/models/toy.hpp"
