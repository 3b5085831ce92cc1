#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace rdstab {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.  Small and unclever on purpose: every
// dimension this library touches is tiny (n <= a few dozen).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diag(const Vector& d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix transposed() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    Matrix operator*(const Matrix& o) const;

    bool same_shape(const Matrix& o) const noexcept {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    // Largest |entry|.
    double max_abs() const;
    // Operator infinity norm (max absolute row sum).
    double norm_inf() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Vector mat_vec(const Matrix& a, const Vector& x);   // A x
Vector vec_mat(const Vector& v, const Matrix& a);   // v^T A  (returned as a row)

double dot(const Vector& a, const Vector& b);
double norm_inf(const Vector& v);

// Entrywise vector orderings with an absolute slack for values that went
// through text serialization.  geq0: every entry >= -slack.  gt0: geq0 and at
// least one entry > slack.  ggt0: every entry > slack.
bool all_geq0(const Vector& v, double slack = 0.0);
bool is_gt0(const Vector& v, double slack = 0.0);
bool is_ggt0(const Vector& v, double slack = 0.0);

// a <= b entrywise, up to slack.
bool leq_entrywise(const Matrix& a, const Matrix& b, double slack = 0.0);

// Square matrix with finite, nonnegative entries.  Construction validates;
// entries in (-slack, 0) coming from serialized input are clamped to zero.
class NonnegMatrix {
public:
    explicit NonnegMatrix(Matrix m, double slack = 0.0);
    static NonnegMatrix from_rows(const std::vector<Vector>& rows, double slack = 0.0);

    std::size_t dim() const noexcept { return mat_.rows(); }
    const Matrix& mat() const noexcept { return mat_; }
    double operator()(std::size_t i, std::size_t j) const { return mat_(i, j); }

private:
    Matrix mat_;
};

// True when the directed graph on {0..n-1} with an edge i->j for a(i,j) > 0 is
// strongly connected.  A 1x1 matrix counts as irreducible regardless of its
// single entry.
bool is_irreducible(const NonnegMatrix& a);

// The coupled one-step map for two systems exchanging mass through d:
//
//     M = [ A - D    D   ]
//         [   D    B - D ]
//
// Construction rejects any d with a(i,j) < d(i,j) or b(i,j) < d(i,j), since
// that would push a diagonal block negative.  The three ingredients are kept
// alongside the assembled matrix so they can be recovered bit-for-bit.
class CoupledMatrix {
public:
    CoupledMatrix(NonnegMatrix a, NonnegMatrix b, NonnegMatrix d);

    const NonnegMatrix& matrix() const noexcept { return m_; }
    const NonnegMatrix& a() const noexcept { return a_; }
    const NonnegMatrix& b() const noexcept { return b_; }
    const NonnegMatrix& d() const noexcept { return d_; }
    std::size_t block_dim() const noexcept { return a_.dim(); }

private:
    NonnegMatrix a_, b_, d_;
    NonnegMatrix m_;
};

} // namespace rdstab
