#pragma once

#include <vector>

#include "besovop/matrix.hpp"

namespace besovop {

struct SvdResult {
  std::vector<double> values;  // nonincreasing, length min(rows, cols)
  Matrix u;                    // rows x r, columns are left singular vectors
  Matrix v;                    // cols x r, columns are right singular vectors
  int sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD. Rotations act on the rows of A or of
/// A^T, whichever has fewer rows, so every update is a contiguous SIMD pass.
/// Vectors paired with zero singular values are left as zero columns.
/// ConvergenceFailure when the sweep cap is exceeded.
SvdResult jacobi_svd(const Matrix& a, bool want_vectors);

inline constexpr int kMaxJacobiSweeps = 60;

}  // namespace besovop
