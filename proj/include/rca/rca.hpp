#pragma once

// Rich component analysis: cumulant-based separation of additive latent
// components across linearly related views, plus downstream moment learners.

#include "rca/contrastive.hpp"
#include "rca/cumulants.hpp"
#include "rca/errors.hpp"
#include "rca/experiments.hpp"
#include "rca/general.hpp"
#include "rca/gradient.hpp"
#include "rca/io.hpp"
#include "rca/ising.hpp"
#include "rca/learners.hpp"
#include "rca/random.hpp"
#include "rca/tensor.hpp"
