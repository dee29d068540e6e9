#pragma once

// Umbrella header for the virtual Markov chain toolkit.

#include "vmc/balayage.hpp"
#include "vmc/catalog.hpp"
#include "vmc/csv.hpp"
#include "vmc/distribution.hpp"
#include "vmc/errors.hpp"
#include "vmc/extended_balayage.hpp"
#include "vmc/families.hpp"
#include "vmc/json_io.hpp"
#include "vmc/linsolve.hpp"
#include "vmc/marginal.hpp"
#include "vmc/matrix.hpp"
#include "vmc/parallel.hpp"
#include "vmc/path.hpp"
#include "vmc/rational.hpp"
#include "vmc/rng.hpp"
#include "vmc/smc.hpp"
#include "vmc/vid.hpp"
#include "vmc/vmcsim.hpp"
#include "vmc/vtm.hpp"
#include "vmc/zolaw.hpp"
