#pragma once

// Umbrella header.

#include "lgpac/frechet.hpp"
#include "lgpac/expr.hpp"
#include "lgpac/limits.hpp"
#include "lgpac/network.hpp"
#include "lgpac/compile.hpp"
#include "lgpac/simulate.hpp"
#include "lgpac/dsl.hpp"
#include "lgpac/oracles.hpp"
#include "lgpac/constructions.hpp"
#include "lgpac/workflow.hpp"
#include "lgpac/io.hpp"
