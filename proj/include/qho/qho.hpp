#pragma once

#include "qho/fock.hpp"
#include "qho/coherent.hpp"
#include "qho/observables.hpp"
#include "qho/wavefunction.hpp"
#include "qho/evolution.hpp"
#include "qho/io.hpp"
