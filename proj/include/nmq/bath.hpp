// bath.hpp — reservoir spectral densities, thermofield split into filled/empty
// effective baths, and orthogonal-polynomial chain-mapping coefficients.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nmq/errors.hpp"
#include "nmq/quadrature.hpp"

namespace nmq {

enum class SpectralShape { SemiElliptic };

// J(w) = (2 Gamma / pi^2) sqrt(1 - (w/D)^2) inside the band, 0 outside.
// Total coupling strength satisfies (1/2) ∫ 2π J dω = Γ D.
struct SpectralDensity {
    double gamma = 0.0;      // total coupling strength Γ, units of D
    double bandwidth = 1.0;  // half-bandwidth D, the global energy unit
    SpectralShape shape = SpectralShape::SemiElliptic;

    double operator()(double omega) const {
        const double x = omega / bandwidth;
        if (std::abs(x) > 1.0) return 0.0;
        return (2.0 * gamma / (M_PI * M_PI)) * std::sqrt(1.0 - x * x);
    }
};

struct BathSpec {
    SpectralDensity density;
    double beta = 0.0;  // inverse temperature, units 1/D (may be +inf)
    double mu = 0.0;    // chemical potential, units of D
    int n_modes = 200;  // chain length N_b per thermofield branch

    // Fermi factor, overflow-safe; exact step at beta = inf.
    double fermi(double omega) const {
        if (std::isinf(beta)) {
            if (omega < mu) return 1.0;
            if (omega > mu) return 0.0;
            return 0.5;
        }
        const double x = beta * (omega - mu);
        if (x >= 0.0) {
            const double e = std::exp(-x);
            return e / (1.0 + e);
        }
        return 1.0 / (1.0 + std::exp(x));
    }
};

// Evaluable weight function on a compact support, with suggested panel splits
// (used by quadrature grids to resolve the Fermi step).
struct Weight {
    std::function<double(double)> eval;
    double lo = -1.0;
    double hi = 1.0;
    std::vector<double> splits;

    double operator()(double omega) const { return eval(omega); }
};

// Thermofield split of a thermal bath into filled/empty zero-temperature branches:
// J_f = f J and J_e = (1 - f) J.
inline std::pair<Weight, Weight> thermofield_split(const BathSpec& bath) {
    const double D = bath.density.bandwidth;
    std::vector<double> splits;
    if (bath.mu > -D && bath.mu < D && bath.beta > 0.0) {
        splits.push_back(bath.mu);
        if (!std::isinf(bath.beta) && bath.beta > 20.0) {
            // guard panels around the sharpening step
            splits.push_back(bath.mu - 30.0 / bath.beta);
            splits.push_back(bath.mu + 30.0 / bath.beta);
        }
    }
    Weight filled{[bath](double w) { return bath.fermi(w) * bath.density(w); }, -D, D, splits};
    Weight empty{[bath](double w) { return (1.0 - bath.fermi(w)) * bath.density(w); }, -D, D, splits};
    return {std::move(filled), std::move(empty)};
}

// Recurrence coefficients of the monic orthogonal polynomials of a weight
// function, packaged as tight-binding chain parameters: onsite gamma_n
// (length N_b+1), hopping sqrt(beta_n) (length N_b), and the system coupling
// kappa_0^{-1} = sqrt(∫ w).
struct ChainCoefficients {
    Eigen::VectorXd onsite;
    Eigen::VectorXd hopping;
    double sys_coupling = 0.0;
};

namespace detail {

// Quadrature grid for a band weight. The substitution w = c + r cos(theta)
// removes the sqrt endpoint behaviour of band-limited spectral densities,
// so plain Gauss-Legendre in theta converges fast; interior splits (Fermi
// step) are mapped through to theta panels.
inline quad::Rule band_grid(const Weight& w, int total_points) {
    const double c = 0.5 * (w.lo + w.hi);
    const double r = 0.5 * (w.hi - w.lo);
    std::vector<double> theta_splits;
    for (double s : w.splits) {
        if (s <= w.lo || s >= w.hi) continue;
        theta_splits.push_back(std::acos(std::clamp((s - c) / r, -1.0, 1.0)));
    }
    quad::Rule g = quad::composite_gauss_legendre(0.0, M_PI, theta_splits, total_points);
    quad::Rule out;
    out.nodes.resize(g.nodes.size());
    out.weights.resize(g.nodes.size());
    for (int i = 0; i < g.nodes.size(); ++i) {
        const double th = g.nodes(i);
        const double x = c + r * std::cos(th);
        out.nodes(i) = x;
        out.weights(i) = g.weights(i) * r * std::sin(th) * w(x);
    }
    return out;
}

}  // namespace detail

// Discretized Stieltjes procedure: Lanczos with full reorthogonalization on the
// quadrature-weighted moment operator. Deterministic for fixed inputs.
inline ChainCoefficients chain_coefficients(const Weight& weight, int n_modes, int quadrature_points = 2000) {
    if (n_modes < 1) throw Error("chain_coefficients: n_modes must be >= 1");
    quad::Rule grid = detail::band_grid(weight, quadrature_points);
    const int nq = static_cast<int>(grid.nodes.size());

    double mass = 0.0;
    for (int i = 0; i < nq; ++i) {
        if (grid.weights(i) < 0.0 && grid.weights(i) > -1e-16) grid.weights(i) = 0.0;
        mass += grid.weights(i);
    }
    if (!(mass > 0.0) || !std::isfinite(mass)) throw NonPositiveWeight("chain_coefficients: ∫ weight <= 0");

    const int n_sites = n_modes + 1;  // onsite terms gamma_0 .. gamma_{N_b}
    Eigen::VectorXd alpha(n_sites), b(n_sites);
    Eigen::MatrixXd V(nq, n_sites);

    Eigen::VectorXd v = (grid.weights / mass).cwiseSqrt();
    V.col(0) = v;
    const double scale = std::max(std::abs(weight.lo), std::abs(weight.hi));
    for (int k = 0; k < n_sites; ++k) {
        Eigen::VectorXd u = grid.nodes.cwiseProduct(V.col(k));
        alpha(k) = V.col(k).dot(u);
        u -= alpha(k) * V.col(k);
        if (k > 0) u -= b(k) * V.col(k - 1);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j <= k; ++j) u -= V.col(j).dot(u) * V.col(j);
        if (k + 1 < n_sites) {
            const double nb = u.norm();
            if (nb <= 1e-10 * scale)
                throw RecurrenceBreakdown("chain_coefficients: recurrence broke down at n=" + std::to_string(k + 1) +
                                          " (increase quadrature_points)");
            b(k + 1) = nb;
            V.col(k + 1) = u / nb;
        }
    }

    ChainCoefficients c;
    c.onsite = alpha;
    c.hopping = b.segment(1, n_modes);
    c.sys_coupling = std::sqrt(mass);
    return c;
}

// Γ -> factor·Γ affects only the system coupling: kappa scales by sqrt(factor),
// all gamma_n and beta_n are invariant.
inline ChainCoefficients rescale_first_site(ChainCoefficients coeffs, double factor) {
    if (factor < 0.0) throw Error("rescale_first_site: factor must be >= 0");
    coeffs.sys_coupling *= std::sqrt(factor);
    return coeffs;
}

}  // namespace nmq
