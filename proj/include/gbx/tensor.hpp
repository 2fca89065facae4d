// Frame matrices of vectors, 1-forms, bivectors, 2-forms and (1,1)-tensors,
// and the small amount of exact linear algebra the checkers need.
#pragma once

#include <vector>

#include "gbx/element.hpp"

namespace gbx {

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols) {}
    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    ScalarExpr& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * cols_ + j]; }
    const ScalarExpr& operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * cols_ + j]; }

    Matrix operator*(const Matrix& o) const;
    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator*(const ScalarExpr& c) const;
    Matrix operator-() const { return *this * ScalarExpr(-1); }
    Matrix transpose() const;
    ScalarExpr trace() const;
    bool is_zero() const;
    friend bool operator==(const Matrix& a, const Matrix& b);

    // Gaussian elimination over the scalar field; nullopt when singular.
    std::optional<Matrix> inverse() const;
    ScalarExpr determinant() const;
    // Solve A x = b for square nonsingular A.
    std::optional<std::vector<ScalarExpr>> solve(const std::vector<ScalarExpr>& b) const;

    // Scalar multiple of the identity? Returns the multiple.
    std::optional<ScalarExpr> identity_multiple() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<ScalarExpr> d_;
};

// Components over the frame.  Errors (WrongBidegree) when the element has
// any term of another shape.
std::vector<ScalarExpr> vector_components(const GradedElement& X);  // X = X^a theta_a
std::vector<ScalarExpr> form1_components(const GradedElement& a);   // a = a_b xi^b
Matrix bivector_matrix(const GradedElement& pi);  // pi = sum_{a<b} P(a,b) theta_a theta_b, P skew
Matrix form2_matrix(const GradedElement& w);      // w = sum_{a<b} W(a,b) xi^a xi^b, W skew
Matrix endo_matrix(const GradedElement& N);       // N = N^a_b xi^b theta_a, M(a,b) = N^a_b

GradedElement vector_from(const ContextPtr& ctx, const std::vector<ScalarExpr>& comps);
GradedElement form1_from(const ContextPtr& ctx, const std::vector<ScalarExpr>& comps);
GradedElement bivector_from(const ContextPtr& ctx, const Matrix& P);  // upper triangle used
GradedElement form2_from(const ContextPtr& ctx, const Matrix& W);
GradedElement endo_from_matrix(const ContextPtr& ctx, const Matrix& M);

// Shape tests without throwing.
bool is_vector(const GradedElement& u);
bool is_form1(const GradedElement& u);
bool is_bivector(const GradedElement& u);
bool is_form2(const GradedElement& u);
bool is_endo(const GradedElement& u);
// Exact k-form / k-vector shape.
bool is_k_form(const GradedElement& u, int k);
bool is_k_vector(const GradedElement& u, int k);

// Inertia (positive, negative, zero counts) of a symmetric rational matrix.
struct Inertia {
    int positive = 0, negative = 0, zero = 0;
    friend bool operator==(const Inertia& a, const Inertia& b) {
        return a.positive == b.positive && a.negative == b.negative && a.zero == b.zero;
    }
};
Inertia inertia(std::vector<std::vector<Rational>> A);

} // namespace gbx
