// redfield.hpp — weak-coupling oracle: bath correlation functions, the
// time-dependent second-order generator, its converged limit, and the
// perturbative fast state.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "nmq/bath.hpp"
#include "nmq/errors.hpp"
#include "nmq/fock.hpp"
#include "nmq/gaussian.hpp"
#include "nmq/superop.hpp"

namespace nmq {

// Spectral representation of the bath correlation functions,
//   C+(tau) = ∫ J(w) f(w) e^{+i w tau} dw   (particle kernel)
//   C-(tau) = ∫ J(w) (1-f(w)) e^{-i w tau} dw   (hole kernel)
// evaluated on a cached band grid.
class BathCorrelation {
  public:
    explicit BathCorrelation(const BathSpec& bath, int quadrature_points = 2000) {
        auto [filled, empty] = thermofield_split(bath);
        grid_f_ = detail::band_grid(filled, quadrature_points);
        grid_e_ = detail::band_grid(empty, quadrature_points);
    }

    std::complex<double> cplus(double tau) const { return fourier(grid_f_, tau); }
    std::complex<double> cminus(double tau) const { return fourier(grid_e_, -tau); }

  private:
    static std::complex<double> fourier(const quad::Rule& g, double tau) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < g.nodes.size(); ++i) acc += g.weights(i) * std::polar(1.0, g.nodes(i) * tau);
        return acc;
    }
    quad::Rule grid_f_;
    quad::Rule grid_e_;
};

inline std::pair<std::complex<double>, std::complex<double>> bath_correlation(const BathSpec& bath, double tau,
                                                                              int quadrature_points = 2000) {
    BathCorrelation c(bath, quadrature_points);
    return {c.cplus(tau), c.cminus(tau)};
}

// relative-decay memory estimate: first tau with |C(tau)|/|C(0)| below threshold for both kernels
inline double correlation_memory_time(const BathSpec& bath, double threshold = 0.05, double tau_max = 200.0,
                                      double dtau = 0.25, int quadrature_points = 2000) {
    BathCorrelation c(bath, quadrature_points);
    const double c0p = std::abs(c.cplus(0.0)), c0m = std::abs(c.cminus(0.0));
    double last_bad = 0.0;
    for (double tau = dtau; tau <= tau_max; tau += dtau) {
        const bool ok = std::abs(c.cplus(tau)) < threshold * c0p && std::abs(c.cminus(tau)) < threshold * c0m;
        if (!ok) last_bad = tau;
    }
    if (last_bad >= tau_max - dtau) throw NotConverged("correlation_memory_time: correlations do not decay in window");
    return last_bad + dtau;
}

// Second-order time-convolutionless generator
//   L(tau)[rho] = -i[H_S, rho] - Σ_a ( [Q_a†, Q1_a(tau) rho] + [rho Q2_a(tau), Q_a†] + h.c. )
// with filtered operators
//   Q1_a(tau) = ∫_0^tau Q_a^I(-t) C-_a(t) dt,   Q2_a(tau) = ∫_0^tau Q_a^I(-t) C+_a(t)* dt,
// Q_a^I(-t) = e^{-i H_S t} Q_a e^{i H_S t}. The kernel-to-operator pairing is
// pinned by the converged golden-rule limit (gain 2πJ(ε)f(ε), loss
// 2πJ(ε)(1-f(ε))) and validated against exact chain dynamics.
class RedfieldGenerator {
  public:
    RedfieldGenerator(const SystemSpec& sys, const std::vector<BathSpec>& baths, int quadrature_points = 2000,
                      double cache_dt = 0.025)
        : cache_dt_(cache_dt) {
        sys.validate();
        if (static_cast<int>(baths.size()) < 1 || static_cast<int>(baths.size()) > 2)
            throw ConfigError("RedfieldGenerator: need 1 or 2 baths");
        d_ = 1 << sys.n_modes;

        FockSpace fock(sys.n_modes);
        H_ = fock.quadratic(sys.single_particle());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H_);
        Heval_ = es.eigenvalues();
        Hevec_ = es.eigenvectors();

        for (std::size_t a = 0; a < baths.size(); ++a) {
            Channel ch;
            ch.corr = std::make_shared<BathCorrelation>(baths[a], quadrature_points);
            const int site = a == 0 ? 0 : sys.n_modes - 1;
            ch.Q = fock.annihilation(site);
            ch.Q1 = Eigen::MatrixXcd::Zero(d_, d_);
            ch.Q2 = Eigen::MatrixXcd::Zero(d_, d_);
            channels_.push_back(std::move(ch));
        }
        tau_cached_ = 0.0;
    }

    int dim() const { return d_; }

    // generator at the requested time; integrals are accumulated incrementally,
    // so requests must be non-decreasing between reset() calls
    SuperOperator at(double tau) {
        advance(tau);
        return build(tau);
    }

    SuperOperator converged(double tau_integral = 400.0) {
        advance(tau_integral);
        return build(tau_integral);
    }

    void reset() {
        for (auto& ch : channels_) {
            ch.Q1.setZero();
            ch.Q2.setZero();
        }
        tau_cached_ = 0.0;
    }

    Eigen::MatrixXcd interaction_picture(const Eigen::MatrixXcd& A, double t) const {
        // e^{-i H t} A e^{i H t}
        Eigen::VectorXcd ph(Heval_.size());
        for (int i = 0; i < Heval_.size(); ++i) ph(i) = std::polar(1.0, -Heval_(i) * t);
        Eigen::MatrixXcd U = Hevec_ * ph.asDiagonal() * Hevec_.adjoint();
        return U * A * U.adjoint();
    }

    const Eigen::MatrixXcd& hamiltonian() const { return H_; }

  private:
    struct Channel {
        std::shared_ptr<BathCorrelation> corr;
        Eigen::MatrixXcd Q;
        Eigen::MatrixXcd Q1, Q2;
    };

    void advance(double tau) {
        if (tau < tau_cached_ - 1e-12) {
            reset();
        }
        while (tau_cached_ < tau - 1e-12) {
            const double t1 = std::min(tau, tau_cached_ + cache_dt_);
            for (auto& ch : channels_) {
                ch.Q1 += quad::adaptive_gk<Eigen::MatrixXcd>(
                    [&](double t) { return Eigen::MatrixXcd(interaction_picture(ch.Q, t) * ch.corr->cminus(t)); },
                    tau_cached_, t1, 1e-10);
                ch.Q2 += quad::adaptive_gk<Eigen::MatrixXcd>(
                    [&](double t) {
                        return Eigen::MatrixXcd(interaction_picture(ch.Q, t) * std::conj(ch.corr->cplus(t)));
                    },
                    tau_cached_, t1, 1e-10);
            }
            tau_cached_ = t1;
        }
    }

    SuperOperator build(double tau) const {
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d_, d_);
        Eigen::MatrixXcd L = commutator_generator(H_);
        for (const auto& ch : channels_) {
            const Eigen::MatrixXcd Qd = ch.Q.adjoint();
            // [Q†, Q1 rho] = Q† Q1 rho - Q1 rho Q†
            Eigen::MatrixXcd T = sandwich_superop(Qd * ch.Q1, id) - sandwich_superop(ch.Q1, Qd);
            // [rho Q2, Q†] = rho Q2 Q† - Q† rho Q2
            T += sandwich_superop(id, ch.Q2 * Qd) - sandwich_superop(Qd, ch.Q2);
            L -= T + hermitian_conjugate_superop(T);
        }
        return {L, tau};
    }

    int d_ = 2;
    double cache_dt_;
    double tau_cached_ = 0.0;
    Eigen::MatrixXcd H_;
    Eigen::VectorXd Heval_;
    Eigen::MatrixXcd Hevec_;
    std::vector<Channel> channels_;
};

// Propagate dΛ/dτ = L_RE(τ) Λ with classical RK4, returning Λ at the grid points.
inline std::vector<SuperOperator> redfield_propagate(RedfieldGenerator& gen, const std::vector<double>& taus) {
    if (taus.empty() || taus.front() != 0.0) throw Error("redfield_propagate: grid must start at tau = 0");
    const int dd = gen.dim() * gen.dim();
    Eigen::MatrixXcd lam = Eigen::MatrixXcd::Identity(dd, dd);
    std::vector<SuperOperator> out;
    out.push_back({lam, 0.0});
    gen.reset();
    for (std::size_t i = 1; i < taus.size(); ++i) {
        const double h = taus[i] - taus[i - 1];
        const int sub = std::max(1, static_cast<int>(std::ceil(h / 0.05)));
        const double hs = h / sub;
        for (int s = 0; s < sub; ++s) {
            const double t0 = taus[i - 1] + s * hs;
            // RK4 needs L at t0, t0+hs/2, t0+hs; request in increasing order
            Eigen::MatrixXcd L0 = gen.at(t0).m;
            Eigen::MatrixXcd Lm = gen.at(t0 + 0.5 * hs).m;
            Eigen::MatrixXcd L1 = gen.at(t0 + hs).m;
            Eigen::MatrixXcd k1 = L0 * lam;
            Eigen::MatrixXcd k2 = Lm * (lam + 0.5 * hs * k1);
            Eigen::MatrixXcd k3 = Lm * (lam + 0.5 * hs * k2);
            Eigen::MatrixXcd k4 = L1 * (lam + hs * k3);
            lam += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        out.push_back({lam, taus[i]});
    }
    return out;
}

// O(gamma^2) inversion of the slippage:
//   rho_f = e^{i H tau} rho_ss e^{-i H tau}
//         - Σ_a ∫_0^tau dt e^{i H t} ( [Q†, Q1_a(t) rho~(t)] + [rho~(t) Q2_a(t), Q†] + h.c. ) e^{-i H t},
// with rho~(t) = e^{-i H (t - tau)} rho_ss e^{i H (t - tau)}.
inline Eigen::MatrixXcd perturbative_fast_state(const SystemSpec& sys, const std::vector<BathSpec>& baths,
                                                double tau_m, const Eigen::MatrixXcd& rho_ss,
                                                int quadrature_points = 2000) {
    RedfieldGenerator gen(sys, baths, quadrature_points);
    const int d = gen.dim();
    FockSpace fock(sys.n_modes);

    // cache Q1, Q2 on a fine grid up to tau_m
    const double dg = 0.02;
    const int n = static_cast<int>(std::ceil(tau_m / dg));
    std::vector<Eigen::MatrixXcd> Q1s, Q2s;
    std::vector<Eigen::MatrixXcd> Qs;
    for (std::size_t a = 0; a < baths.size(); ++a) Qs.push_back(fock.annihilation(a == 0 ? 0 : sys.n_modes - 1));
    std::vector<BathCorrelation> corr;
    for (const auto& b : baths) corr.emplace_back(b, quadrature_points);

    std::vector<std::vector<Eigen::MatrixXcd>> Q1(baths.size()), Q2(baths.size());
    for (std::size_t a = 0; a < baths.size(); ++a) {
        Eigen::MatrixXcd acc1 = Eigen::MatrixXcd::Zero(d, d), acc2 = Eigen::MatrixXcd::Zero(d, d);
        Q1[a].push_back(acc1);
        Q2[a].push_back(acc2);
        for (int i = 0; i < n; ++i) {
            const double t0 = i * dg, t1 = std::min(tau_m, t0 + dg);
            acc1 += quad::adaptive_gk<Eigen::MatrixXcd>(
                [&](double t) { return Eigen::MatrixXcd(gen.interaction_picture(Qs[a], t) * corr[a].cminus(t)); }, t0,
                t1, 1e-11);
            acc2 += quad::adaptive_gk<Eigen::MatrixXcd>(
                [&](double t) {
                    return Eigen::MatrixXcd(gen.interaction_picture(Qs[a], t) * std::conj(corr[a].cplus(t)));
                },
                t0, t1, 1e-11);
            Q1[a].push_back(acc1);
            Q2[a].push_back(acc2);
        }
    }
    auto Q1_at = [&](std::size_t a, double t) { return Q1[a][std::min<std::size_t>(Q1[a].size() - 1, std::lround(t / dg))]; };
    auto Q2_at = [&](std::size_t a, double t) { return Q2[a][std::min<std::size_t>(Q2[a].size() - 1, std::lround(t / dg))]; };

    auto rotate = [&](const Eigen::MatrixXcd& X, double t) { return gen.interaction_picture(X, -t); };  // e^{iHt} X e^{-iHt}

    Eigen::MatrixXcd rho_f = rotate(rho_ss, tau_m);
    for (std::size_t a = 0; a < baths.size(); ++a) {
        const Eigen::MatrixXcd Qd = Qs[a].adjoint();
        Eigen::MatrixXcd corr_term = quad::adaptive_gk<Eigen::MatrixXcd>(
            [&](double t) {
                Eigen::MatrixXcd rho_t = gen.interaction_picture(rho_ss, t - tau_m);  // e^{-iH(t-tau)} rho e^{iH(t-tau)}
                Eigen::MatrixXcd inner = Qd * Q1_at(a, t) * rho_t - Q1_at(a, t) * rho_t * Qd;
                inner += rho_t * Q2_at(a, t) * Qd - Qd * rho_t * Q2_at(a, t);
                inner += inner.adjoint().eval();
                return Eigen::MatrixXcd(rotate(inner, t));
            },
            0.0, tau_m, 1e-9);
        rho_f -= corr_term;
    }
    rho_f = 0.5 * (rho_f + rho_f.adjoint()).eval();
    return rho_f / rho_f.trace().real();
}

}  // namespace nmq
