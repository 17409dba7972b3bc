#ifndef ACL_ACL_HPP
#define ACL_ACL_HPP

// Umbrella header: sketched learning with symmetric or distorted (quantized,
// modulo) random periodic feature maps.

#include "acl/common.hpp"
#include "acl/eval.hpp"
#include "acl/features.hpp"
#include "acl/io.hpp"
#include "acl/models.hpp"
#include "acl/periodic.hpp"
#include "acl/rng.hpp"
#include "acl/sketch.hpp"
#include "acl/solver.hpp"
#include "acl/theory.hpp"
#include "acl/verify.hpp"

#endif  // ACL_ACL_HPP
