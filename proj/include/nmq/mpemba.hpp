// mpemba.hpp — damping basis of the converged generator, fast-state
// construction, and classification of anomalous relaxation.
#pragma once

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "nmq/errors.hpp"
#include "nmq/superop.hpp"
#include "nmq/tomography.hpp"

namespace nmq {

// Biorthonormal eigensystem of a generator: L F_mu = lambda_mu F_mu,
// L† G_mu = lambda_mu* G_mu, Tr(G_mu† F_nu) = delta_{mu nu}. Eigenvalues are
// sorted by |Re| ascending (ties: |Im|, then real part, then imaginary part),
// so mu = 1 is the stationary mode and mu = 2 the slowest decaying one.
struct DampingBasis {
    Eigen::VectorXcd eigenvalues;
    std::vector<Eigen::MatrixXcd> right_ops;  // F_mu
    std::vector<Eigen::MatrixXcd> left_ops;   // G_mu

    int size() const { return static_cast<int>(eigenvalues.size()); }

    // alpha_mu(X) = Tr(G_mu† X)
    std::complex<double> amplitude(int mu, const Eigen::MatrixXcd& X) const {
        return (left_ops[mu].adjoint() * X).trace();
    }
};

inline DampingBasis damping_basis(const SuperOperator& L, double gram_cond_threshold = 1e10) {
    const int d = L.dim();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L.m);
    if (es.info() != Eigen::Success) throw Error("damping_basis: eigensolver failed");

    const int n = d * d;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXcd& ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto za = ev(a), zb = ev(b);
        if (std::abs(std::abs(za.real()) - std::abs(zb.real())) > 1e-14) return std::abs(za.real()) < std::abs(zb.real());
        if (std::abs(std::abs(za.imag()) - std::abs(zb.imag())) > 1e-14) return std::abs(za.imag()) < std::abs(zb.imag());
        if (za.real() != zb.real()) return za.real() < zb.real();
        return za.imag() < zb.imag();
    });

    Eigen::MatrixXcd V(n, n);
    DampingBasis basis;
    basis.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) {
        basis.eigenvalues(i) = ev(order[i]);
        V.col(i) = es.eigenvectors().col(order[i]);
    }
    if (condition_number(V) > gram_cond_threshold)
        throw NonDiagonalizable("damping_basis: eigenvector matrix is numerically singular (Jordan block?)");

    // rows of V^{-1} are the biorthogonal left eigenvectors
    Eigen::MatrixXcd Vinv = V.inverse();

    // fix scales: F_1 has unit trace (the fixed point), decaying modes are
    // Frobenius-normalized with the largest entry rotated to the positive axis
    basis.right_ops.resize(n);
    basis.left_ops.resize(n);
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXcd F = unvec(V.col(i), d);
        std::complex<double> scale;
        if (i == 0) {
            const std::complex<double> tr = F.trace();
            if (std::abs(tr) < 1e-12) throw ZeroTrace("damping_basis: stationary eigenoperator is traceless");
            scale = tr;
        } else {
            Eigen::Index r, c;
            F.cwiseAbs().maxCoeff(&r, &c);
            scale = F.norm() * (F(r, c) / std::abs(F(r, c)));
        }
        F /= scale;
        basis.right_ops[i] = F;
        // w_i† = (V^{-1})_i scaled inversely so Tr(G_i† F_j) stays delta_ij
        Eigen::VectorXcd w = Vinv.row(i).adjoint();
        basis.left_ops[i] = unvec(Eigen::VectorXcd(w * std::conj(scale)), d);
    }
    return basis;
}

// Fast-relaxing initial state: rho_f = S^{-1}[rho_ss], normalized and
// Hermitized. Non-physical results are reported, never clipped.
struct FastState {
    Eigen::MatrixXcd rho;
    bool physical = true;
    double min_eig = 0.0;
};

inline FastState fast_state(const SuperOperator& S, const Eigen::MatrixXcd& rho_ss, double cond_threshold = 1e12,
                            double positivity_tol = -1e-8) {
    if (condition_number(S.m) > cond_threshold) throw SingularMap("fast_state: slippage map is singular");
    const int d = static_cast<int>(rho_ss.rows());
    Eigen::MatrixXcd X = unvec(Eigen::VectorXcd(S.m.partialPivLu().solve(vec(rho_ss))), d);
    const std::complex<double> tr = X.trace();
    if (std::abs(tr) < 1e-12) throw ZeroTrace("fast_state: S^{-1}[rho_ss] is traceless");
    X /= tr;
    X = 0.5 * (X + X.adjoint()).eval();
    FastState f;
    f.rho = X;
    f.min_eig = min_eigenvalue(X);
    f.physical = f.min_eig >= positivity_tol;
    return f;
}

// Single-dot closed form: p_f = (nu - (1 - p_inf)) / (nu - sigma) with
// nu = <0|S[|0><0|]|0>, sigma = <0|S[|1><1|]|0>.
inline double fast_state_population_closed_form(const SuperOperator& S, double p_inf) {
    if (S.dim() != 2) throw DimensionMismatch("fast_state_population_closed_form: single dot only");
    const double nu = act(S, (Eigen::MatrixXcd(2, 2) << 1, 0, 0, 0).finished())(0, 0).real();
    const double sigma = act(S, (Eigen::MatrixXcd(2, 2) << 0, 0, 0, 1).finished())(0, 0).real();
    return (nu - (1.0 - p_inf)) / (nu - sigma);
}

// decay-mode components after the slippage, alpha_mu = Tr(G_mu† S[rho0]), mu >= 2
inline Eigen::VectorXcd mode_amplitudes(const DampingBasis& basis, const SuperOperator& S,
                                        const Eigen::MatrixXcd& rho0) {
    const Eigen::MatrixXcd slipped = act(S, rho0);
    Eigen::VectorXcd alpha(basis.size() - 1);
    for (int mu = 1; mu < basis.size(); ++mu) alpha(mu - 1) = basis.amplitude(mu, slipped);
    return alpha;
}

enum class MpembaKind { None, Weak, Strong, Extreme };

struct MpembaReport {
    MpembaKind kind = MpembaKind::None;
    Eigen::VectorXcd amplitudes_fast;  // alpha_mu(rho_f), mu = 2..d^2
    Eigen::VectorXcd amplitudes_ss;    // alpha_mu(rho_ss)
    int slowest_excited_fast = -1;     // nu_0 (index into the damping basis), -1 if none
    int slowest_excited_ss = -1;       // kappa_0
    bool physical = true;
    double delta = 0.0;                // T[rho_f, rho_ss]
};

inline const char* to_string(MpembaKind k) {
    switch (k) {
        case MpembaKind::None: return "None";
        case MpembaKind::Weak: return "Weak";
        case MpembaKind::Strong: return "Strong";
        case MpembaKind::Extreme: return "Extreme";
    }
    return "?";
}

inline MpembaReport classify(const DampingBasis& basis, const SuperOperator& S, const Eigen::MatrixXcd& rho_ss,
                             double amplitude_tol = 1e-6) {
    MpembaReport rep;
    FastState f = fast_state(S, rho_ss);
    rep.physical = f.physical;
    rep.delta = trace_distance(f.rho, rho_ss);
    rep.amplitudes_fast = mode_amplitudes(basis, S, f.rho);
    rep.amplitudes_ss = mode_amplitudes(basis, S, rho_ss);

    const double tol = amplitude_tol * std::max(1.0, trace_norm(rho_ss));
    auto slowest = [&](const Eigen::VectorXcd& a) {
        for (int i = 0; i < a.size(); ++i)
            if (std::abs(a(i)) > tol) return i + 1;  // damping-basis index
        return -1;
    };
    rep.slowest_excited_fast = slowest(rep.amplitudes_fast);
    rep.slowest_excited_ss = slowest(rep.amplitudes_ss);

    if (rep.slowest_excited_fast < 0) {
        rep.kind = rep.slowest_excited_ss < 0 ? MpembaKind::None : MpembaKind::Extreme;
        return rep;
    }
    if (rep.slowest_excited_ss < 0) {
        rep.kind = MpembaKind::None;  // steady state relaxes at least as fast
        return rep;
    }
    // compare decay rates, not raw indices, so conjugate pairs count as ties
    const double rate_f = std::abs(basis.eigenvalues(rep.slowest_excited_fast).real());
    const double rate_s = std::abs(basis.eigenvalues(rep.slowest_excited_ss).real());
    const double rate_tol = 1e-9 * std::max({rate_f, rate_s, 1e-300});
    if (rate_f > rate_s + rate_tol)
        rep.kind = MpembaKind::Strong;
    else if (rate_f < rate_s - rate_tol)
        rep.kind = MpembaKind::None;
    else {
        // amplitude in the slowest excited group (conjugate pairs summed)
        auto group_amp = [&](const Eigen::VectorXcd& a, double rate) {
            double s = 0.0;
            for (int mu = 1; mu < basis.size(); ++mu)
                if (std::abs(std::abs(basis.eigenvalues(mu).real()) - rate) <= rate_tol) s += std::abs(a(mu - 1));
            return s;
        };
        rep.kind = group_amp(rep.amplitudes_fast, rate_f) < group_amp(rep.amplitudes_ss, rate_s) ? MpembaKind::Weak
                                                                                                 : MpembaKind::None;
    }
    return rep;
}

// rho(tau) ~ rho_ss + Σ_{mu>=2} e^{lambda_mu (tau - tau_L)} alpha_mu F_mu for tau >= tau_L
inline Eigen::MatrixXcd reconstruct_long_time(const DampingBasis& basis, const Eigen::MatrixXcd& rho_ss,
                                              const Eigen::VectorXcd& amplitudes, double tau, double tau_L) {
    Eigen::MatrixXcd rho = rho_ss;
    for (int mu = 1; mu < basis.size(); ++mu)
        rho += std::exp(basis.eigenvalues(mu) * (tau - tau_L)) * amplitudes(mu - 1) * basis.right_ops[mu];
    return rho;
}

}  // namespace nmq
