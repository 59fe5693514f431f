#pragma once

// Umbrella header for the library (JSON support lives in bform/io.hpp).

#include "bform/certificate.hpp"
#include "bform/eigenpairs.hpp"
#include "bform/errors.hpp"
#include "bform/experiments.hpp"
#include "bform/form.hpp"
#include "bform/rank_k.hpp"
#include "bform/real_counts.hpp"
#include "bform/roots.hpp"
#include "bform/scalar.hpp"
#include "bform/spectral.hpp"
