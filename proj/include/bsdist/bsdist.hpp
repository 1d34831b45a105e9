#pragma once

// Umbrella header for the Birnbaum-Saunders distribution library.

#include "bsdist/bayes.hpp"
#include "bsdist/censored.hpp"
#include "bsdist/datasets.hpp"
#include "bsdist/estimators.hpp"
#include "bsdist/gof.hpp"
#include "bsdist/linalg.hpp"
#include "bsdist/math.hpp"
#include "bsdist/mixture.hpp"
#include "bsdist/multivariate.hpp"
#include "bsdist/mvn.hpp"
#include "bsdist/optimize.hpp"
#include "bsdist/regression.hpp"
#include "bsdist/related.hpp"
#include "bsdist/robust.hpp"
#include "bsdist/rng.hpp"
#include "bsdist/univariate.hpp"
