#ifndef NLSEP_NLSEP_HPP
#define NLSEP_NLSEP_HPP

#include "nlsep/errors.hpp"
#include "nlsep/fft.hpp"
#include "nlsep/harness/config.hpp"
#include "nlsep/harness/csv.hpp"
#include "nlsep/harness/experiments.hpp"
#include "nlsep/harness/initial.hpp"
#include "nlsep/harness/snapshot.hpp"
#include "nlsep/phi.hpp"
#include "nlsep/quadrature.hpp"
#include "nlsep/schemes.hpp"
#include "nlsep/spectral.hpp"
#include "nlsep/stepper.hpp"

#endif  // NLSEP_NLSEP_HPP
