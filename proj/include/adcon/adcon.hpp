#pragma once

#include "adcon/analysis.hpp"
#include "adcon/controller.hpp"
#include "adcon/errors.hpp"
#include "adcon/graph.hpp"
#include "adcon/integrate.hpp"
#include "adcon/io.hpp"
#include "adcon/plant.hpp"
#include "adcon/scenario.hpp"
#include "adcon/sim.hpp"
#include "adcon/trajectory.hpp"
#include "adcon/uncertainty.hpp"
