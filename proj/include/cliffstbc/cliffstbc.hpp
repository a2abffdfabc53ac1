#pragma once

#include "cliffstbc/clifford_algebra.hpp"
#include "cliffstbc/codebook.hpp"
#include "cliffstbc/constructions.hpp"
#include "cliffstbc/design.hpp"
#include "cliffstbc/design_io.hpp"
#include "cliffstbc/differential.hpp"
#include "cliffstbc/diversity.hpp"
#include "cliffstbc/lattice_tables.hpp"
#include "cliffstbc/montecarlo.hpp"
#include "cliffstbc/ofdm.hpp"
#include "cliffstbc/relay.hpp"
#include "cliffstbc/signal_sets.hpp"
#include "cliffstbc/template.hpp"
