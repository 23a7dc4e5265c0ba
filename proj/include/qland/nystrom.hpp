#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "qland/hessian.hpp"

namespace qland {

/// Eigenvalues of the reduced operator K from an n-point uniform-grid
/// discretization. Trapezoid weights keep the |t-s| kink on cell boundaries;
/// the weighted matrix is symmetrized as D^{1/2} K D^{1/2} before solving.
inline std::vector<double> nystrom_eigenvalues(const LandscapePoint& p, int n_points = 512) {
    const int n = n_points;
    const double h = p.T / static_cast<double>(n - 1);
    Eigen::MatrixXd s(n, n);
    std::vector<double> sw(n);
    for (int i = 0; i < n; ++i) sw[i] = std::sqrt((i == 0 || i == n - 1) ? 0.5 * h : h);
    for (int i = 0; i < n; ++i) {
        const double ti = i * h;
        for (int j = 0; j <= i; ++j) {
            const double val = reduced_kernel(ti, j * h, p) * sw[i] * sw[j];
            s(i, j) = val;
            s(j, i) = val;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    std::vector<double> mu(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    std::sort(mu.begin(), mu.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
    return mu;
}

} // namespace qland
