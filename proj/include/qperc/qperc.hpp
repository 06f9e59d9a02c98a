#pragma once

#include "qperc/analysis.hpp"
#include "qperc/engine.hpp"
#include "qperc/errors.hpp"
#include "qperc/io.hpp"
#include "qperc/quantum_math.hpp"
#include "qperc/random.hpp"
#include "qperc/topology.hpp"
