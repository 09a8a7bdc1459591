#pragma once

#include <span>

namespace levelgen {

/// Correctly rounded sum of the terms. The result does not depend on the
/// order of the terms. Falls back to naive summation if any term is not finite.
double exact_sum(std::span<const double> terms);

}  // namespace levelgen
