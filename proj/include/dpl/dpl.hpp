#pragma once

#include "dpl/algebra.hpp"
#include "dpl/config.hpp"
#include "dpl/dynamics.hpp"
#include "dpl/error.hpp"
#include "dpl/fieldbridge.hpp"
#include "dpl/io.hpp"
#include "dpl/kgrid.hpp"
#include "dpl/observables.hpp"
#include "dpl/state.hpp"
#include "dpl/units.hpp"
