#pragma once

#include "charge_engine.hpp"
#include "crystal.hpp"
#include "cube_ideal.hpp"
#include "errors.hpp"
#include "hypercube_lab.hpp"
#include "lattice.hpp"
#include "lemma_suite.hpp"
#include "parallel.hpp"
