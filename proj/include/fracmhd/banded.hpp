#pragma once

#include <complex>
#include <vector>

#include "fracmhd/spectral.hpp"

namespace fracmhd {

// LDL^T of a symmetric matrix with nonzeros at offsets 0 and +-2.  The matrix
// splits into two interleaved tridiagonal chains (even and odd j), each
// factored independently.  No pivoting; T may be complex (symmetric, not
// Hermitian), which is safe whenever the real part is positive definite.
template <class T>
class EvenPentaLDL {
public:
    EvenPentaLDL() = default;
    EvenPentaLDL(std::vector<T> diag, std::vector<T> off2);

    std::vector<T> solve(const std::vector<T>& b) const;
    int size() const { return static_cast<int>(d_.size()); }
    // Smallest |pivot| seen during factorization.
    double min_pivot() const { return min_pivot_; }

private:
    std::vector<T> d_;  // pivots
    std::vector<T> l_;  // multipliers, l_[j] couples j and j+2
    double min_pivot_ = 0.0;
};

using RealLDL = EvenPentaLDL<double>;
using ComplexLDL = EvenPentaLDL<std::complex<double>>;

// a*S + b*diag(D) in even-penta form.
template <class T>
void combine(const EvenPenta& S, const Vec& D, T a, T b, std::vector<T>& diag, std::vector<T>& off2);

}  // namespace fracmhd
