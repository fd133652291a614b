#ifndef SONINE_SONINE_HPP
#define SONINE_SONINE_HPP

#include "sonine/errors.hpp"
#include "sonine/special_functions.hpp"
#include "sonine/quadrature.hpp"
#include "sonine/fft.hpp"
#include "sonine/fit.hpp"
#include "sonine/timescales.hpp"
#include "sonine/kernels.hpp"
#include "sonine/grid.hpp"
#include "sonine/semigroup.hpp"
#include "sonine/fracops.hpp"
#include "sonine/cauchy.hpp"

#endif  // SONINE_SONINE_HPP
