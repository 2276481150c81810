// Umbrella header.
#ifndef GSLQ_GSLQ_HPP_
#define GSLQ_GSLQ_HPP_

#include "gslq/admm.hpp"
#include "gslq/fprox.hpp"
#include "gslq/gprox.hpp"
#include "gslq/io.hpp"
#include "gslq/model.hpp"
#include "gslq/palm.hpp"
#include "gslq/report.hpp"
#include "gslq/symvec.hpp"

#endif  // GSLQ_GSLQ_HPP_
