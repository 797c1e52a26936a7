#pragma once

#include "flavornet/community.hpp"
#include "flavornet/error.hpp"
#include "flavornet/graph_core.hpp"
#include "flavornet/graph_io.hpp"
#include "flavornet/map_equation.hpp"
#include "flavornet/pipeline.hpp"
#include "flavornet/random.hpp"
#include "flavornet/recipe_corpus.hpp"
#include "flavornet/reconciliation.hpp"
#include "flavornet/synthetic.hpp"
