#include "fracmhd/banded.hpp"

#include "fracmhd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

namespace fracmhd {

template <class T>
EvenPentaLDL<T>::EvenPentaLDL(std::vector<T> diag, std::vector<T> off2)
    : d_(std::move(diag)), l_(std::move(off2)) {
    const int n = size();
    if (n > 2 && static_cast<int>(l_.size()) != n - 2)
        throw ArgumentError("off2 must have n-2 entries");
    min_pivot_ = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        if (j >= 2) {
            // e is the original (j-2, j) entry, l_[j-2] currently holds it
            T e = l_[j - 2];
            T m = e / d_[j - 2];
            d_[j] -= m * e;
            l_[j - 2] = m;
        }
        double a = std::abs(d_[j]);
        if (!(a > 0.0) || !std::isfinite(a))
            throw NumericalError("LDL^T breakdown at pivot " + std::to_string(j));
        if constexpr (std::is_same_v<T, double>) {
            if (d_[j] <= 0.0)
                throw NumericalError("matrix not positive definite (pivot " + std::to_string(j) +
                                     " = " + std::to_string(d_[j]) + ")");
        }
        min_pivot_ = std::min(min_pivot_, a);
    }
}

template <class T>
std::vector<T> EvenPentaLDL<T>::solve(const std::vector<T>& b) const {
    const int n = size();
    if (static_cast<int>(b.size()) != n) throw ArgumentError("rhs length mismatch");
    std::vector<T> x(b);
    for (int j = 2; j < n; ++j) x[j] -= l_[j - 2] * x[j - 2];
    for (int j = 0; j < n; ++j) x[j] /= d_[j];
    for (int j = n - 3; j >= 0; --j) x[j] -= l_[j] * x[j + 2];
    return x;
}

template <class T>
void combine(const EvenPenta& S, const Vec& D, T a, T b, std::vector<T>& diag, std::vector<T>& off2) {
    const int n = S.size();
    diag.resize(n);
    off2.resize(std::max(0, n - 2));
    for (int j = 0; j < n; ++j) diag[j] = a * S.diag[j] + b * D[j];
    for (int j = 0; j + 2 < n; ++j) off2[j] = a * S.off2[j];
}

template class EvenPentaLDL<double>;
template class EvenPentaLDL<std::complex<double>>;
template void combine<double>(const EvenPenta&, const Vec&, double, double, std::vector<double>&,
                              std::vector<double>&);
template void combine<std::complex<double>>(const EvenPenta&, const Vec&, std::complex<double>,
                                            std::complex<double>,
                                            std::vector<std::complex<double>>&,
                                            std::vector<std::complex<double>>&);

}  // namespace fracmhd
