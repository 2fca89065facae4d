#include "gbx/tensor.hpp"

#include <bit>

namespace gbx {

// ------------------------------------------------------------------ Matrix

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = ScalarExpr(1);
    return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw Error(ErrorCode::TypeError, "matrix shape mismatch");
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const ScalarExpr& a = (*this)(i, k);
            if (a.is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j)
                if (!o(k, j).is_zero()) r(i, j) += a * o(k, j);
        }
    return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::TypeError, "matrix shape mismatch");
    Matrix r = *this;
    for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] += o.d_[i];
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const { return *this + (-o); }

Matrix Matrix::operator*(const ScalarExpr& c) const {
    Matrix r = *this;
    for (auto& x : r.d_) x = x * c;
    return r;
}

Matrix Matrix::transpose() const {
    Matrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

ScalarExpr Matrix::trace() const {
    ScalarExpr t;
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

bool Matrix::is_zero() const {
    for (const auto& x : d_)
        if (!x.is_zero()) return false;
    return true;
}

bool operator==(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t i = 0; i < a.d_.size(); ++i)
        if (!(a.d_[i] == b.d_[i])) return false;
    return true;
}

std::optional<Matrix> Matrix::inverse() const {
    if (rows_ != cols_) throw Error(ErrorCode::TypeError, "inverse of a non-square matrix");
    const int n = rows_;
    Matrix a = *this, inv = identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (!a(i, c).is_zero()) {
                // Prefer constant pivots to keep fractions small.
                if (piv < 0 || (a(i, c).is_constant() && !a(piv, c).is_constant())) piv = i;
            }
        if (piv < 0) return std::nullopt;
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(c, j), a(piv, j));
                std::swap(inv(c, j), inv(piv, j));
            }
        ScalarExpr p = a(c, c).inverse();
        for (int j = 0; j < n; ++j) {
            a(c, j) = a(c, j) * p;
            inv(c, j) = inv(c, j) * p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c || a(i, c).is_zero()) continue;
            ScalarExpr f = a(i, c);
            for (int j = 0; j < n; ++j) {
                if (!a(c, j).is_zero()) a(i, j) -= f * a(c, j);
                if (!inv(c, j).is_zero()) inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

ScalarExpr Matrix::determinant() const {
    if (rows_ != cols_) throw Error(ErrorCode::TypeError, "determinant of a non-square matrix");
    const int n = rows_;
    Matrix a = *this;
    ScalarExpr det(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (!a(i, c).is_zero()) {
                if (piv < 0 || (a(i, c).is_constant() && !a(piv, c).is_constant())) piv = i;
            }
        if (piv < 0) return ScalarExpr();
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
            det = -det;
        }
        det = det * a(c, c);
        ScalarExpr p = a(c, c).inverse();
        for (int i = c + 1; i < n; ++i) {
            if (a(i, c).is_zero()) continue;
            ScalarExpr f = a(i, c) * p;
            for (int j = c; j < n; ++j)
                if (!a(c, j).is_zero()) a(i, j) -= f * a(c, j);
        }
    }
    return det;
}

std::optional<std::vector<ScalarExpr>> Matrix::solve(const std::vector<ScalarExpr>& b) const {
    auto inv = inverse();
    if (!inv) return std::nullopt;
    std::vector<ScalarExpr> x(rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (!(*inv)(i, j).is_zero()) x[i] += (*inv)(i, j) * b[j];
    return x;
}

std::optional<ScalarExpr> Matrix::identity_multiple() const {
    if (rows_ != cols_) return std::nullopt;
    ScalarExpr c = rows_ ? (*this)(0, 0) : ScalarExpr();
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) {
            const ScalarExpr& x = (*this)(i, j);
            if (i == j ? !(x == c) : !x.is_zero()) return std::nullopt;
        }
    return c;
}

// ------------------------------------------------------- frame extraction

namespace {

std::uint32_t theta_mask(int r) { return (1u << r) - 1u; }

[[noreturn]] void wrong_shape(const GradedElement& u, const char* what) {
    throw Error(ErrorCode::WrongBidegree, std::string("expected ") + what + ", got " + to_string(u));
}

// Indices of set bits in increasing order.
std::vector<int> bits(std::uint32_t w) {
    std::vector<int> b;
    for (; w; w &= w - 1) b.push_back(std::countr_zero(w));
    return b;
}

} // namespace

bool is_k_vector(const GradedElement& u, int k) {
    if (!u.is_multivector()) return false;
    for (const auto& [key, c] : u.terms())
        if (std::popcount(key.word) != k) return false;
    return true;
}

bool is_k_form(const GradedElement& u, int k) {
    if (!u.is_form()) return false;
    for (const auto& [key, c] : u.terms())
        if (std::popcount(key.word) != k) return false;
    return true;
}

bool is_vector(const GradedElement& u) { return is_k_vector(u, 1); }
bool is_form1(const GradedElement& u) { return is_k_form(u, 1); }
bool is_bivector(const GradedElement& u) { return is_k_vector(u, 2); }
bool is_form2(const GradedElement& u) { return is_k_form(u, 2); }

bool is_endo(const GradedElement& u) {
    if (!u.is_p_free()) return false;
    const int r = u.context()->r();
    for (const auto& [key, c] : u.terms()) {
        if (std::popcount(key.word & theta_mask(r)) != 1) return false;
        if (std::popcount(key.word & ~theta_mask(r)) != 1) return false;
    }
    return true;
}

std::vector<ScalarExpr> vector_components(const GradedElement& X) {
    if (!is_vector(X)) wrong_shape(X, "a vector");
    std::vector<ScalarExpr> v(X.context()->r());
    for (const auto& [k, c] : X.terms()) v[std::countr_zero(k.word)] = c;
    return v;
}

std::vector<ScalarExpr> form1_components(const GradedElement& a) {
    if (!is_form1(a)) wrong_shape(a, "a 1-form");
    const int r = a.context()->r();
    std::vector<ScalarExpr> v(r);
    for (const auto& [k, c] : a.terms()) v[std::countr_zero(k.word) - r] = c;
    return v;
}

Matrix bivector_matrix(const GradedElement& pi) {
    if (!is_bivector(pi)) wrong_shape(pi, "a bivector");
    const int r = pi.context()->r();
    Matrix P(r, r);
    for (const auto& [k, c] : pi.terms()) {
        auto b = bits(k.word);
        P(b[0], b[1]) = c;
        P(b[1], b[0]) = -c;
    }
    return P;
}

Matrix form2_matrix(const GradedElement& w) {
    if (!is_form2(w)) wrong_shape(w, "a 2-form");
    const int r = w.context()->r();
    Matrix W(r, r);
    for (const auto& [k, c] : w.terms()) {
        auto b = bits(k.word);
        W(b[0] - r, b[1] - r) = c;
        W(b[1] - r, b[0] - r) = -c;
    }
    return W;
}

Matrix endo_matrix(const GradedElement& N) {
    if (!is_endo(N)) wrong_shape(N, "a (1,1)-tensor");
    const int r = N.context()->r();
    Matrix M(r, r);
    // Canonical word theta_a xi^b = -xi^b theta_a.
    for (const auto& [k, c] : N.terms()) {
        auto b = bits(k.word);
        M(b[0], b[1] - r) = -c;
    }
    return M;
}

GradedElement vector_from(const ContextPtr& ctx, const std::vector<ScalarExpr>& comps) {
    GradedElement X(ctx);
    for (std::size_t a = 0; a < comps.size(); ++a) X += GradedElement::theta(ctx, static_cast<int>(a)) * comps[a];
    return X;
}

GradedElement form1_from(const ContextPtr& ctx, const std::vector<ScalarExpr>& comps) {
    GradedElement X(ctx);
    for (std::size_t a = 0; a < comps.size(); ++a) X += GradedElement::xi(ctx, static_cast<int>(a)) * comps[a];
    return X;
}

GradedElement bivector_from(const ContextPtr& ctx, const Matrix& P) {
    GradedElement pi(ctx);
    const int r = ctx->r();
    std::vector<std::uint8_t> z(ctx->n(), 0);
    for (int a = 0; a < r; ++a)
        for (int b = a + 1; b < r; ++b)
            if (!P(a, b).is_zero()) pi += GradedElement::monomial(ctx, P(a, b), z, {a, b});
    return pi;
}

GradedElement form2_from(const ContextPtr& ctx, const Matrix& W) {
    GradedElement w(ctx);
    const int r = ctx->r();
    std::vector<std::uint8_t> z(ctx->n(), 0);
    for (int a = 0; a < r; ++a)
        for (int b = a + 1; b < r; ++b)
            if (!W(a, b).is_zero()) w += GradedElement::monomial(ctx, W(a, b), z, {r + a, r + b});
    return w;
}

GradedElement endo_from_matrix(const ContextPtr& ctx, const Matrix& M) {
    GradedElement N(ctx);
    const int r = ctx->r();
    std::vector<std::uint8_t> z(ctx->n(), 0);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            if (!M(a, b).is_zero()) N += GradedElement::monomial(ctx, M(a, b), z, {r + b, a});
    return N;
}

// ----------------------------------------------------------------- inertia

Inertia inertia(std::vector<std::vector<Rational>> A) {
    const int n = static_cast<int>(A.size());
    Inertia out;
    std::vector<bool> done(n, false);
    for (int step = 0; step < n; ++step) {
        int piv = -1;
        for (int i = 0; i < n && piv < 0; ++i)
            if (!done[i] && A[i][i] != 0) piv = i;
        if (piv < 0) {
            // All remaining diagonal entries vanish: bring up an off-diagonal one.
            int pi = -1, pj = -1;
            for (int i = 0; i < n && pi < 0; ++i)
                for (int j = 0; j < n; ++j)
                    if (!done[i] && !done[j] && i != j && A[i][j] != 0) {
                        pi = i;
                        pj = j;
                        break;
                    }
            if (pi < 0) break;
            // Congruence e_i -> e_i + e_j makes A[i][i] = 2 A[i][j].
            for (int k = 0; k < n; ++k) A[pi][k] += A[pj][k];
            for (int k = 0; k < n; ++k) A[k][pi] += A[k][pj];
            piv = pi;
        }
        const Rational p = A[piv][piv];
        (p > 0 ? out.positive : out.negative)++;
        done[piv] = true;
        for (int i = 0; i < n; ++i) {
            if (done[i] || A[i][piv] == 0) continue;
            Rational f = A[i][piv] / p;
            for (int k = 0; k < n; ++k) A[i][k] -= f * A[piv][k];
        }
        for (int k = 0; k < n; ++k) {
            if (done[k] || A[piv][k] == 0) continue;
            A[piv][k] = 0;
            A[k][piv] = 0;
        }
    }
    out.zero = n - out.positive - out.negative;
    return out;
}

} // namespace gbx
