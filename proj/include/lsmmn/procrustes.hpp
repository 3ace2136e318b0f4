#pragma once

#include "lsmmn/types.hpp"

namespace lsmmn {

/// Similarity of two configurations after optimal translation, rotation/reflection and
/// isotropic scaling: sqrt(1 - minimised residual sum of squares of the unit-scaled
/// configurations). Symmetric in its arguments, in [0, 1], and 1 iff one configuration is a
/// similarity transform of the other. Throws DomainError for a configuration whose rows all
/// coincide.
double procrustes_correlation(const Coordinates& a, const Coordinates& b);

/// Rigidly moves `x` (translation plus rotation/reflection, no scaling) onto `target`.
Coordinates procrustes_align(const Coordinates& target, const Coordinates& x);

}  // namespace lsmmn
