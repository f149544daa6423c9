#pragma once

#include "muskat/branch.hpp"
#include "muskat/errors.hpp"
#include "muskat/ivp.hpp"
#include "muskat/pendulum.hpp"
#include "muskat/period.hpp"
#include "muskat/special.hpp"
