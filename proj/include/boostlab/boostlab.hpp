#pragma once

#include "boostlab/bregman.hpp"
#include "boostlab/diagnostics.hpp"
#include "boostlab/engine.hpp"
#include "boostlab/errors.hpp"
#include "boostlab/hypothesis.hpp"
#include "boostlab/implicit_measure.hpp"
#include "boostlab/io.hpp"
#include "boostlab/learners.hpp"
#include "boostlab/ledger.hpp"
#include "boostlab/measure.hpp"
#include "boostlab/numeric.hpp"
#include "boostlab/quantum.hpp"
#include "boostlab/rng.hpp"
#include "boostlab/tasks.hpp"
#include "boostlab/verify.hpp"
