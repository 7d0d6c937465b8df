#pragma once

#include "hardedge/errors.hpp"
#include "hardedge/gap_engine.hpp"
#include "hardedge/limit_laws.hpp"
#include "hardedge/parallel.hpp"
#include "hardedge/potential.hpp"
#include "hardedge/quadrature.hpp"
#include "hardedge/random.hpp"
#include "hardedge/sampler.hpp"
#include "hardedge/specfun.hpp"
