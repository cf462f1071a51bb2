#pragma once

#include "echelon/config.hpp"
#include "echelon/core.hpp"
#include "echelon/cost_model.hpp"
#include "echelon/demand_bounds.hpp"
#include "echelon/demand_probability.hpp"
#include "echelon/enumeration.hpp"
#include "echelon/optimizer.hpp"
#include "echelon/simulation.hpp"
#include "echelon/unit_costs.hpp"
#include "echelon/validation.hpp"
