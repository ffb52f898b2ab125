#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dse/errors.hpp"

namespace dse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative tolerance for numerical rank decisions.
inline constexpr double kRankTolRel = 1e-10;

bool all_finite(const Matrix& m);

/// Checked construction from row-major entries. Throws StructuralError on
/// size mismatch or non-finite entries.
Matrix make_matrix(Eigen::Index rows, Eigen::Index cols, const std::vector<double>& row_major);

/// Matrix exponential e^{A t} by scaling-and-squaring with a Taylor core.
/// The core uses only matrix products and sums, so block-triangular zero
/// patterns of A are preserved exactly.
Matrix mat_exp(const Matrix& a, double t = 1.0);

/// Adjugate and determinant computed jointly by the Faddeev-LeVerrier
/// recursion. Valid for singular input: adj(M) * M = det(M) * I always holds.
std::pair<Matrix, double> adjugate_and_det(const Matrix& m);

/// Numerical rank (singular values >= sigma_max * max(rows,cols) * tol_rel)
/// and an orthonormal basis of the column space (rows x rank).
std::pair<int, Matrix> rank_and_range(const Matrix& m, double tol_rel = kRankTolRel);

struct RangeNullBases {
    int rank = 0;
    Matrix range;      // cols x rank, orthonormal, spans row space of M
    Matrix null_space; // cols x (cols - rank), orthonormal, spans ker M
};

/// Orthonormal bases of the row space and kernel of M from one SVD.
/// Right singular vectors are sign-canonicalized (largest-magnitude entry
/// positive) so the result is deterministic.
RangeNullBases row_space_and_kernel(const Matrix& m, double tol_rel = kRankTolRel);

}  // namespace dse
