#pragma once

// Action and Nehari functionals on discrete fields.
//
//   Q_L(u)  = u^T K_x u + L^{-2} u^T K_y u + omega u^T M u   (rescaled, width L)
//   Q(u)    = u^T K u + omega u^T M u                         (physical book)
//   N(u)    = sum_i m_i |u_i|^{p+1}                           (lumped quadrature)
//   S       = Q/2 - N/(p+1),   I = Q - N,   level = c_p N,   c_p = (p-1)/(2(p+1))

#include "openbook/discretization.hpp"

#include <optional>

namespace openbook {

struct Params {
    double omega = 1.0;
    double p = 3.0;
    /// Transverse width of the rescaled problem; absent for a physical book.
    std::optional<double> width;
};

/// Throws ValidationError unless p > 1, omega finite and width (if any) > 0.
void check_params(const Params& params);

[[nodiscard]] double nonlinearity_constant(double p) noexcept;

struct FunctionalReport {
    double qx = 0.0;
    double qy = 0.0;
    double mass2 = 0.0;
    double np1 = 0.0;
    double action = 0.0;
    double nehari = 0.0;
    double level = 0.0;

    /// Quadratic part Q_L (or Q) including the omega term.
    double quadratic = 0.0;
};

[[nodiscard]] FunctionalReport evaluate(const Vector& u, const DiscreteOperators& ops, const Params& params);

/// The operator K_L + omega M whose quadratic form is Q_L.
[[nodiscard]] SparseMatrix quadratic_operator(const DiscreteOperators& ops, const Params& params);

/// Gradient of the action: (K_L + omega M) u - m |u|^{p-1} u.
[[nodiscard]] Vector action_gradient(const Vector& u, const SparseMatrix& quadratic, const DiscreteOperators& ops,
                                     double p);

/// Scaling factor that moves u onto the Nehari manifold, (Q_L(u)/N(u))^{1/(p-1)}.
[[nodiscard]] double nehari_factor(const FunctionalReport& report, double p);

/// pi(u) u. Throws ValidationError for u = 0 or Q_L(u) <= 0.
[[nodiscard]] Field nehari_project(const Field& u, const DiscreteOperators& ops, const Params& params);

/// q_y / (q_x + q_y); 0 for 0/0. Needs the stiffness split.
[[nodiscard]] double transverse_fraction(const Vector& u, const DiscreteOperators& ops);

[[nodiscard]] std::string to_json(const FunctionalReport& report);

} // namespace openbook
