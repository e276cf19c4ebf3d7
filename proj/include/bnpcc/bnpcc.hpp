#ifndef BNPCC_BNPCC_HPP
#define BNPCC_BNPCC_HPP

#include "bnpcc/calibration.hpp"
#include "bnpcc/copula.hpp"
#include "bnpcc/error.hpp"
#include "bnpcc/io.hpp"
#include "bnpcc/normal.hpp"
#include "bnpcc/posterior.hpp"
#include "bnpcc/pseudo.hpp"
#include "bnpcc/random.hpp"
#include "bnpcc/sampler.hpp"
#include "bnpcc/stats.hpp"
#include "bnpcc/synth.hpp"

#endif  // BNPCC_BNPCC_HPP
