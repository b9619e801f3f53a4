#pragma once

#include "mucca/baselines.hpp"
#include "mucca/error.hpp"
#include "mucca/game.hpp"
#include "mucca/graph.hpp"
#include "mucca/harness.hpp"
#include "mucca/hinge.hpp"
#include "mucca/io.hpp"
#include "mucca/knn.hpp"
#include "mucca/predictor.hpp"
#include "mucca/rng.hpp"
#include "mucca/spanning.hpp"
