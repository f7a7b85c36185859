#pragma once

#include "nlap/errors.hpp"
#include "nlap/rng.hpp"
#include "nlap/linalg.hpp"
#include "nlap/parallel.hpp"
#include "nlap/nonlin.hpp"
#include "nlap/models.hpp"
#include "nlap/laplacian.hpp"
#include "nlap/spectra.hpp"
#include "nlap/quadrature.hpp"
#include "nlap/theory.hpp"
#include "nlap/optimize.hpp"
#include "nlap/experiments.hpp"
#include "nlap/config.hpp"
#include "nlap/version.hpp"
