#pragma once

#include "crn/conservation.hpp"
#include "crn/csv.hpp"
#include "crn/eed.hpp"
#include "crn/entropy.hpp"
#include "crn/equilibria.hpp"
#include "crn/grid.hpp"
#include "crn/network.hpp"
#include "crn/ode.hpp"
#include "crn/parse.hpp"
#include "crn/pde.hpp"
