#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nadyn::oracle {

// Roots of sum c_k z^k from the eigenvalues of the companion matrix.
inline std::vector<std::complex<double>> companion_roots(const std::vector<std::complex<double>>& c)
{
    int n = static_cast<int>(c.size()) - 1;
    while (n > 0 && c[static_cast<std::size_t>(n)] == std::complex<double>(0.0)) {
        --n;
    }
    if (n <= 0) {
        return {};
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        m(i, i - 1) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        m(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)];
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
    std::vector<std::complex<double>> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(es.eigenvalues()(i));
    }
    return out;
}

} // namespace nadyn::oracle
