#pragma once

#include "qanneal/baseline.hpp"
#include "qanneal/bits.hpp"
#include "qanneal/circuit.hpp"
#include "qanneal/cost.hpp"
#include "qanneal/ensemble.hpp"
#include "qanneal/errors.hpp"
#include "qanneal/io.hpp"
#include "qanneal/parallel.hpp"
#include "qanneal/rng.hpp"
#include "qanneal/statevec.hpp"
#include "qanneal/version.hpp"
