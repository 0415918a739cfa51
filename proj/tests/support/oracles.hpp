#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library's element matrices, solvers or eigensolvers.

#include "openbook/discretization.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace oracle {

inline const double kPi = std::acos(-1.0);

/// Level c_p ||phi||_{p+1}^{p+1} of the line soliton
/// phi(x) = ((p+1) omega / 2)^{1/(p-1)} sech^{2/(p-1)}((p-1) sqrt(omega) x / 2),
/// by composite Simpson on [-X, X].
inline double soliton_level(double omega, double p)
{
    const double amp = std::pow((p + 1.0) * omega / 2.0, 1.0 / (p - 1.0));
    const double k = (p - 1.0) * std::sqrt(omega) / 2.0;
    const double X = 60.0 / k;
    const int n = 200000;
    const double dx = 2.0 * X / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = -X + i * dx;
        const double phi = amp * std::pow(1.0 / std::cosh(k * x), 2.0 / (p - 1.0));
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * std::pow(phi, p + 1.0);
    }
    return (p - 1.0) / (2.0 * (p + 1.0)) * sum * dx / 3.0;
}

/// Lowest eigenvalue of -d^2/dx^2 + 1 - 6 sech^2 x by second-order finite
/// differences on [-X, X] with Dirichlet ends, dense symmetric tridiagonal QR.
inline double linearized_soliton_eigenvalue(double X = 20.0, int n = 4000)
{
    const double dx = 2.0 * X / (n + 1);
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -1.0 / (dx * dx));
    for (int i = 0; i < n; ++i) {
        const double x = -X + (i + 1) * dx;
        const double s = 1.0 / std::cosh(x);
        diag[i] = 2.0 / (dx * dx) + 1.0 - 6.0 * s * s;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[0];
}

struct DenseForms {
    Eigen::MatrixXd k;
    Eigen::MatrixXd kx;
    Eigen::MatrixXd ky;
    Eigen::MatrixXd m;
};

inline double hat(double x, double centre, double h) { return std::max(0.0, 1.0 - std::abs(x - centre) / h); }

inline double hat_slope(double x, double centre, double h)
{
    if (std::abs(x - centre) >= h) return 0.0;
    return x < centre ? 1.0 / h : -1.0 / h;
}

/// Brute-force integration of nodal basis products: every page node's tensor
/// hat is evaluated at 3x3 Gauss points of every cell and the products are
/// scattered through the page-to-global map.
inline DenseForms integrate_book(const openbook::BookMesh& mesh)
{
    const int n = mesh.dofs.dof_count;
    DenseForms out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                   Eigen::MatrixXd::Zero(n, n)};
    const std::array<double, 3> gx{-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    const std::array<double, 3> gw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (std::size_t pg = 0; pg < mesh.book.pages.size(); ++pg) {
        const auto& g = mesh.plan.pages[pg];
        const int nodes = g.nx * g.ny;
        for (int cj = 0; cj + 1 < g.ny; ++cj) {
            for (int ci = 0; ci + 1 < g.nx; ++ci) {
                for (int a = 0; a < 3; ++a) {
                    for (int b = 0; b < 3; ++b) {
                        const double x = (ci + 0.5 + 0.5 * gx[a]) * g.hx;
                        const double y = (cj + 0.5 + 0.5 * gx[b]) * g.hy;
                        const double w = gw[a] * gw[b] * 0.25 * g.hx * g.hy;
                        std::vector<double> phi(nodes), dx(nodes), dy(nodes);
                        for (int j = 0; j < g.ny; ++j) {
                            for (int i = 0; i < g.nx; ++i) {
                                const int q = j * g.nx + i;
                                phi[q] = hat(x, i * g.hx, g.hx) * hat(y, j * g.hy, g.hy);
                                dx[q] = hat_slope(x, i * g.hx, g.hx) * hat(y, j * g.hy, g.hy);
                                dy[q] = hat(x, i * g.hx, g.hx) * hat_slope(y, j * g.hy, g.hy);
                            }
                        }
                        for (int q = 0; q < nodes; ++q) {
                            for (int r = 0; r < nodes; ++r) {
                                const int I = mesh.dofs.page_dofs[pg][q];
                                const int J = mesh.dofs.page_dofs[pg][r];
                                out.kx(I, J) += w * dx[q] * dx[r];
                                out.ky(I, J) += w * dy[q] * dy[r];
                                out.m(I, J) += w * phi[q] * phi[r];
                            }
                        }
                    }
                }
            }
        }
    }
    out.k = out.kx + out.ky;
    return out;
}

/// Same for piecewise-linear elements on a graph mesh.
inline DenseForms integrate_graph(const openbook::GraphMesh& mesh)
{
    const int n = mesh.dof_count;
    DenseForms out{Eigen::MatrixXd::Zero(n, n), {}, {}, Eigen::MatrixXd::Zero(n, n)};
    const std::array<double, 3> gx{-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    const std::array<double, 3> gw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (std::size_t e = 0; e < mesh.edge_dofs.size(); ++e) {
        const double h = mesh.edge_h[e];
        const int nodes = mesh.edge_nodes[e];
        for (int c = 0; c + 1 < nodes; ++c) {
            for (int a = 0; a < 3; ++a) {
                const double x = (c + 0.5 + 0.5 * gx[a]) * h;
                const double w = gw[a] * 0.5 * h;
                for (int q = 0; q < nodes; ++q) {
                    for (int r = 0; r < nodes; ++r) {
                        const int I = mesh.edge_dofs[e][q];
                        const int J = mesh.edge_dofs[e][r];
                        out.k(I, J) += w * hat_slope(x, q * h, h) * hat_slope(x, r * h, h);
                        out.m(I, J) += w * hat(x, q * h, h) * hat(x, r * h, h);
                    }
                }
            }
        }
    }
    return out;
}

inline double max_abs_diff(const openbook::SparseMatrix& a, const Eigen::MatrixXd& b)
{
    return (Eigen::MatrixXd(a) - b).cwiseAbs().maxCoeff();
}

} // namespace oracle
