#pragma once

#include "specdet/closedform.hpp"
#include "specdet/commands.hpp"
#include "specdet/config.hpp"
#include "specdet/determinant.hpp"
#include "specdet/error.hpp"
#include "specdet/ode.hpp"
#include "specdet/oracle.hpp"
#include "specdet/potential.hpp"
#include "specdet/specfun.hpp"
#include "specdet/specs.hpp"
#include "specdet/validate.hpp"
