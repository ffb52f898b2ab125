#include "dse/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace dse {

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

Matrix make_matrix(Eigen::Index rows, Eigen::Index cols, const std::vector<double>& row_major) {
    if (rows <= 0 || cols <= 0)
        throw StructuralError("make_matrix: dimensions must be positive");
    if (static_cast<Eigen::Index>(row_major.size()) != rows * cols)
        throw StructuralError("make_matrix: entry count " + std::to_string(row_major.size()) +
                              " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = row_major[static_cast<size_t>(i * cols + j)];
    if (!all_finite(m)) throw StructuralError("make_matrix: non-finite entry");
    return m;
}

Matrix mat_exp(const Matrix& a, double t) {
    if (a.rows() != a.cols()) throw StructuralError("mat_exp: matrix must be square");
    if (!std::isfinite(t)) throw StructuralError("mat_exp: t must be finite");
    const Eigen::Index n = a.rows();
    if (n == 0) return Matrix(0, 0);

    Matrix b = a * t;
    // Scale so the Taylor series converges fast, then square back.
    const double norm = b.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        b /= std::ldexp(1.0, squarings);
    }

    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= 24; ++k) {
        term = (term * b) / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * result.cwiseAbs().maxCoeff()) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

std::pair<Matrix, double> adjugate_and_det(const Matrix& m) {
    if (m.rows() != m.cols()) throw StructuralError("adjugate_and_det: matrix must be square");
    const Eigen::Index n = m.rows();
    if (n == 0) return {Matrix(0, 0), 1.0};

    // Faddeev-LeVerrier: builds adj and det together without any inversion,
    // so rank-deficient input is fine.
    Matrix mk = Matrix::Zero(n, n);
    double c = 1.0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        mk = m * mk + c * Matrix::Identity(n, n);
        c = -(m * mk).trace() / static_cast<double>(k);
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return {-sign * mk, sign * c};
}

std::pair<int, Matrix> rank_and_range(const Matrix& m, double tol_rel) {
    if (m.size() == 0) throw StructuralError("rank_and_range: empty matrix");
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double thresh = sv.size() > 0 ? sv(0) * static_cast<double>(std::max(m.rows(), m.cols())) * tol_rel : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) >= thresh && sv(i) > 0.0) ++r;
    return {r, svd.matrixU().leftCols(r)};
}

namespace {

void canonicalize_column_signs(Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index imax = 0;
        m.col(j).cwiseAbs().maxCoeff(&imax);
        if (m(imax, j) < 0) m.col(j) = -m.col(j);
    }
}

}  // namespace

RangeNullBases row_space_and_kernel(const Matrix& m, double tol_rel) {
    if (m.size() == 0) throw StructuralError("row_space_and_kernel: empty matrix");
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thresh = sv.size() > 0 ? sv(0) * static_cast<double>(std::max(m.rows(), m.cols())) * tol_rel : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) >= thresh && sv(i) > 0.0) ++r;
    RangeNullBases out;
    out.rank = r;
    out.range = svd.matrixV().leftCols(r);
    out.null_space = svd.matrixV().rightCols(m.cols() - r);
    canonicalize_column_signs(out.range);
    canonicalize_column_signs(out.null_space);
    return out;
}

}  // namespace dse
