// negf.hpp — steady-state transport oracle for the non-interacting system:
// lead self-energies, transmission, Landauer currents, and occupations.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "nmq/bath.hpp"
#include "nmq/errors.hpp"
#include "nmq/gaussian.hpp"
#include "nmq/quadrature.hpp"

namespace nmq {

// Retarded lead self-energy Sigma(w) = PV ∫ J(w')/(w-w') dw' - i pi J(w),
// i.e. the boundary value of ∫ J(w')/(z-w') dw'. The principal-value sign is
// pinned by the spectral sum rule (∫ A = 1, no bound states for the
// semi-elliptic band at these couplings); the closed form of the semicircle
// Hilbert transform is used by default, the quadrature path is kept for
// cross-validation.
inline std::complex<double> self_energy(const SpectralDensity& sd, double omega, bool closed_form = true) {
    const double D = sd.bandwidth;
    const double x = omega / D;
    if (closed_form && sd.shape == SpectralShape::SemiElliptic) {
        const double pref = 2.0 * sd.gamma / M_PI;
        if (std::abs(x) <= 1.0) return pref * std::complex<double>(x, -std::sqrt(1.0 - x * x));
        // outside the band: real, decaying branch
        const double s = std::sqrt(x * x - 1.0);
        return pref * (x > 0 ? (x - s) : (x + s));
    }
    const double re = -quad::principal_value([&](double w) { return sd(w); }, omega, -D, D, 1e-11);
    return {re, -M_PI * sd(omega)};
}

// Retarded Green function of the dot chain with leads on the end sites.
inline Eigen::MatrixXcd green_function(const SystemSpec& sys, const std::vector<SpectralDensity>& leads,
                                       double omega) {
    sys.validate();
    const int n = sys.n_modes;
    Eigen::MatrixXcd M = omega * Eigen::MatrixXcd::Identity(n, n) - sys.single_particle();
    M(0, 0) -= self_energy(leads.at(0), omega);
    if (leads.size() > 1) M(n - 1, n - 1) -= self_energy(leads.at(1), omega);
    return M.inverse();
}

// tau(w) = 4 pi^2 J_L J_R |G_{1,N}|^2
inline double transmission(const SystemSpec& sys, const SpectralDensity& left, const SpectralDensity& right,
                           double omega) {
    if (std::abs(omega) >= left.bandwidth) return 0.0;
    Eigen::MatrixXcd G = green_function(sys, {left, right}, omega);
    const double g2 = std::norm(G(0, sys.n_modes - 1));
    return 4.0 * M_PI * M_PI * left(omega) * right(omega) * g2;
}

// Landauer integrals over the band with the Fermi-window integrand.
// Returns (particle current, energy current), positive from left to right.
inline std::pair<double, double> steady_currents(const SystemSpec& sys, const BathSpec& left,
                                                 const BathSpec& right, double abs_tol = 1e-12) {
    const double D = left.density.bandwidth;
    std::vector<double> edges{-D, D};
    for (double m : {left.mu, right.mu})
        if (m > -D && m < D) edges.push_back(m);
    std::sort(edges.begin(), edges.end());
    double jp = 0.0, je = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        jp += quad::adaptive_gk<double>(
            [&](double w) {
                return transmission(sys, left.density, right.density, w) * (left.fermi(w) - right.fermi(w));
            },
            edges[i], edges[i + 1], abs_tol);
        je += quad::adaptive_gk<double>(
            [&](double w) {
                return w * transmission(sys, left.density, right.density, w) * (left.fermi(w) - right.fermi(w));
            },
            edges[i], edges[i + 1], abs_tol);
    }
    return {jp / (2.0 * M_PI), je / (2.0 * M_PI)};
}

// n_i = ∫ dw Σ_a J_a(w) |G_{i,c(a)}(w)|^2 f_a(w); the 2π convention is pinned
// by the spectral sum rule ∫ dw Σ_a J_a |G_{i,c(a)}|^2 = 1.
inline Eigen::VectorXd steady_occupation(const SystemSpec& sys, const std::vector<BathSpec>& baths,
                                         double abs_tol = 1e-10) {
    sys.validate();
    if (baths.empty() || baths.size() > 2) throw ConfigError("steady_occupation: need 1 or 2 baths");
    const int n = sys.n_modes;
    const double D = baths.front().density.bandwidth;
    std::vector<SpectralDensity> leads;
    for (const auto& b : baths) leads.push_back(b.density);

    // split at chemical potentials and at the dot resonances for the adaptive rule
    std::vector<double> edges{-D, D};
    for (const auto& b : baths)
        if (b.mu > -D && b.mu < D) edges.push_back(b.mu);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(sys.single_particle());
    for (int i = 0; i < n; ++i)
        if (std::abs(hs.eigenvalues()(i)) < D) edges.push_back(hs.eigenvalues()(i));
    std::sort(edges.begin(), edges.end());

    Eigen::VectorXd occ = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        auto integrand = [&](double w) {
            Eigen::MatrixXcd G = green_function(sys, leads, w);
            double v = baths[0].density(w) * std::norm(G(i, 0)) * baths[0].fermi(w);
            if (baths.size() > 1) v += baths[1].density(w) * std::norm(G(i, n - 1)) * baths[1].fermi(w);
            return v;
        };
        for (std::size_t s = 0; s + 1 < edges.size(); ++s)
            occ(i) += quad::adaptive_gk<double>(integrand, edges[s], edges[s + 1], abs_tol);
    }
    return occ;
}

// ∫ dw Σ_a J_a |G_{i,c(a)}|^2, should equal 1 per mode
inline double spectral_sum_rule(const SystemSpec& sys, const std::vector<BathSpec>& baths, int mode,
                                double abs_tol = 1e-10) {
    const int n = sys.n_modes;
    const double D = baths.front().density.bandwidth;
    std::vector<SpectralDensity> leads;
    for (const auto& b : baths) leads.push_back(b.density);
    std::vector<double> edges{-D, D};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(sys.single_particle());
    for (int i = 0; i < n; ++i)
        if (std::abs(hs.eigenvalues()(i)) < D) edges.push_back(hs.eigenvalues()(i));
    std::sort(edges.begin(), edges.end());
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s)
        total += quad::adaptive_gk<double>(
            [&](double w) {
                Eigen::MatrixXcd G = green_function(sys, leads, w);
                double v = leads[0](w) * std::norm(G(mode, 0));
                if (leads.size() > 1) v += leads[1](w) * std::norm(G(mode, n - 1));
                return v;
            },
            edges[s], edges[s + 1], abs_tol);
    return total;
}

}  // namespace nmq
