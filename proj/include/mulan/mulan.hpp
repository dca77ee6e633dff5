// SPDX-License-Identifier: Apache-2.0
// Umbrella header: blind off-grid echo retrieval via multichannel
// annihilating filters, plus the discrete-time baselines, simulators and
// evaluation tools built around it.
#ifndef MULAN_MULAN_HPP
#define MULAN_MULAN_HPP

#include "mulan/annihilation.hpp"
#include "mulan/baselines.hpp"
#include "mulan/config.hpp"
#include "mulan/dft.hpp"
#include "mulan/eig.hpp"
#include "mulan/evaluate.hpp"
#include "mulan/io.hpp"
#include "mulan/poly.hpp"
#include "mulan/rng.hpp"
#include "mulan/simulate.hpp"
#include "mulan/solver.hpp"
#include "mulan/toeplitz.hpp"
#include "mulan/types.hpp"
#include "mulan/vandermonde.hpp"

#endif  // MULAN_MULAN_HPP
