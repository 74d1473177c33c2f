#pragma once

// Umbrella header.

#include "amenable/config.hpp"
#include "amenable/linalg.hpp"
#include "amenable/lp.hpp"
#include "amenable/group.hpp"
#include "amenable/action.hpp"
#include "amenable/averaging.hpp"
#include "amenable/orbitope.hpp"
#include "amenable/embedding.hpp"
#include "amenable/coupling.hpp"
#include "amenable/decision.hpp"
#include "amenable/cocycle.hpp"
#include "amenable/io.hpp"
#include "amenable/verify.hpp"
