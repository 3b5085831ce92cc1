#include "rdstab/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "rdstab/errors.hpp"

namespace rdstab {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw ValidationError("matrix literal has ragged rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diag(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (!same_shape(o)) throw ValidationError("matrix addition: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (!same_shape(o)) throw ValidationError("matrix subtraction: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw ValidationError("matrix product: inner dimension mismatch");
    Matrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
        }
    }
    return r;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double Matrix::norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

Vector mat_vec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw ValidationError("mat_vec: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

Vector vec_mat(const Vector& v, const Matrix& a) {
    if (a.rows() != v.size()) throw ValidationError("vec_mat: dimension mismatch");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += vi * a(i, j);
    }
    return y;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw ValidationError("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_geq0(const Vector& v, double slack) {
    for (double x : v)
        if (x < -slack) return false;
    return true;
}

bool is_gt0(const Vector& v, double slack) {
    if (!all_geq0(v, slack)) return false;
    for (double x : v)
        if (x > slack) return true;
    return false;
}

bool is_ggt0(const Vector& v, double slack) {
    if (v.empty()) return false;
    for (double x : v)
        if (!(x > slack)) return false;
    return true;
}

bool leq_entrywise(const Matrix& a, const Matrix& b, double slack) {
    if (!a.same_shape(b)) throw ValidationError("leq_entrywise: shape mismatch");
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) > b(i, j) + slack) return false;
    return true;
}

NonnegMatrix::NonnegMatrix(Matrix m, double slack) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols())
        throw ValidationError("nonnegative matrix must be square, got " +
                              std::to_string(mat_.rows()) + "x" + std::to_string(mat_.cols()));
    if (mat_.rows() == 0) throw ValidationError("nonnegative matrix must have dimension >= 1");
    for (std::size_t i = 0; i < mat_.rows(); ++i) {
        for (std::size_t j = 0; j < mat_.cols(); ++j) {
            double& x = mat_(i, j);
            if (!std::isfinite(x))
                throw ValidationError("matrix entry (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is not finite");
            if (x < 0.0) {
                if (x >= -slack)
                    x = 0.0;
                else
                    throw ValidationError("matrix entry (" + std::to_string(i) + "," +
                                          std::to_string(j) + ") is negative: " +
                                          std::to_string(x));
            }
        }
    }
}

NonnegMatrix NonnegMatrix::from_rows(const std::vector<Vector>& rows, double slack) {
    const std::size_t n = rows.size();
    Matrix m(n, n == 0 ? 0 : rows.front().size());
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != m.cols()) throw ValidationError("from_rows: ragged rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return NonnegMatrix(std::move(m), slack);
}

namespace {

// Nodes reachable from `start` along edges i->j present when edge(i,j).
std::vector<bool> reachable(const Matrix& a, bool transpose, std::size_t start) {
    const std::size_t n = a.rows();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v) {
            const double w = transpose ? a(v, u) : a(u, v);
            if (w > 0.0 && !seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

} // namespace

bool is_irreducible(const NonnegMatrix& a) {
    const std::size_t n = a.dim();
    if (n == 1) return true;
    const auto fwd = reachable(a.mat(), false, 0);
    const auto bwd = reachable(a.mat(), true, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (!fwd[i] || !bwd[i]) return false;
    return true;
}

CoupledMatrix::CoupledMatrix(NonnegMatrix a, NonnegMatrix b, NonnegMatrix d)
    : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)), m_(Matrix::identity(1)) {
    const std::size_t n = a_.dim();
    if (b_.dim() != n || d_.dim() != n)
        throw ValidationError("coupled matrix: a, b, d must share one dimension");
    Matrix m(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dij = d_(i, j);
            const double atop = a_(i, j) - dij;
            const double bbot = b_(i, j) - dij;
            if (atop < 0.0)
                throw ValidationError("coupling exceeds donor entry a(" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
            if (bbot < 0.0)
                throw ValidationError("coupling exceeds donor entry b(" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
            m(i, j) = atop;
            m(i, n + j) = dij;
            m(n + i, j) = dij;
            m(n + i, n + j) = bbot;
        }
    }
    m_ = NonnegMatrix(std::move(m));
}

} // namespace rdstab
