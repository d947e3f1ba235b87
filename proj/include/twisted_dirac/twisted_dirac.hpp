#pragma once

#include "twisted_dirac/clifford.hpp"
#include "twisted_dirac/conformal.hpp"
#include "twisted_dirac/error.hpp"
#include "twisted_dirac/eta.hpp"
#include "twisted_dirac/polynomial.hpp"
#include "twisted_dirac/spectral_flow.hpp"
#include "twisted_dirac/spectral_models.hpp"
#include "twisted_dirac/torus_operator.hpp"
#include "twisted_dirac/weitzenbock.hpp"
