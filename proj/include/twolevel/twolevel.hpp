#pragma once

#include "twolevel/algorithms.hpp"
#include "twolevel/analysis.hpp"
#include "twolevel/assembly.hpp"
#include "twolevel/element.hpp"
#include "twolevel/error.hpp"
#include "twolevel/experiment.hpp"
#include "twolevel/mesh.hpp"
#include "twolevel/problems.hpp"
#include "twolevel/solver.hpp"
#include "twolevel/space.hpp"
