#ifndef AERANGE_AERANGE_HPP
#define AERANGE_AERANGE_HPP

#include "interval.hpp"
#include "matrix.hpp"
#include "affine.hpp"
#include "dual.hpp"
#include "autodiff.hpp"
#include "expr.hpp"
#include "model.hpp"
#include "ae_core.hpp"
#include "joint_range.hpp"
#include "reach.hpp"
#include "io.hpp"
#include "svg.hpp"

#endif
