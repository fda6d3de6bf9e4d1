// tomography.hpp — dynamical-map extraction from the evolved system+ancilla
// state, time-convolutionless generators, memory times, and the slippage map.
#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "nmq/errors.hpp"
#include "nmq/superop.hpp"

namespace nmq {

// ---------------------------------------------------------------------------
// Fermionic Choi conventions (fixed here, used by the preparation in
// gaussian.hpp and the unfolding below):
//
//   * modes are ordered  s_1 .. s_Ns, a_1 .. a_Ns;  Fock index has s_1 as the
//     most significant bit, so index = i_S * d + i_A with d = 2^Ns;
//   * the prepared pair state is  Π_i (c†_{s_i} + c†_{a_i})/sqrt(2) |vac>,
//     the particle-hole transform of the maximally entangled state.  Written
//     in the Fock basis it is  (1/sqrt d) Σ_m sign(m) |m>_S ⊗ |~m>_A  where
//     ~m is the bitwise complement and sign(m) counts the fermionic
//     reordering inversions:  sign(m) = (-1)^{#{(i<j): s_i empty, s_j filled}};
//   * unfolding:  Λ[|m><n|]_{kl} = d * sign(m) sign(n) * rho_SA[(k,~m),(l,~n)].
//
// The anticommuting strings of modes that sit between the system and the
// right chains are absorbed exactly by this relabeling: for parity-even
// sectors the unfolded map coincides with the qubit channel of the chain
// simulation, for parity-odd sectors it carries the fermionic string by
// construction. Validated against the closed-system limit and the many-body
// brute-force oracle.
// ---------------------------------------------------------------------------

inline double choi_pair_sign(int m, int n_system) {
    int inversions = 0;
    for (int j = 0; j < n_system; ++j) {
        if (!(m >> (n_system - 1 - j) & 1)) continue;  // s_j filled
        for (int i = 0; i < j; ++i)
            if (!(m >> (n_system - 1 - i) & 1)) ++inversions;  // s_i empty
    }
    return (inversions & 1) ? -1.0 : 1.0;
}

// exact prepared state Π_i (c†_{s_i} + c†_{a_i})/sqrt(2)|vac> as a 4^Ns matrix
inline Eigen::MatrixXcd choi_reference_state(int n_system) {
    const int d = 1 << n_system;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d * d);
    for (int m = 0; m < d; ++m) {
        const int a = ~m & (d - 1);
        psi(m * d + a) = choi_pair_sign(m, n_system) / std::sqrt(double(d));
    }
    return psi * psi.adjoint();
}

struct ExtractOptions {
    double cp_violation_threshold = -1e-5;
    double tp_violation_threshold = 1e-6;
    bool check = true;
};

// Unfold the evolved system+ancilla density operator into the dynamical map.
inline SuperOperator extract_map(const Eigen::MatrixXcd& evolved_choi_state, int d, double tau = 0.0,
                                 const ExtractOptions& opts = {}) {
    if (evolved_choi_state.rows() != d * d || evolved_choi_state.cols() != d * d)
        throw DimensionMismatch("extract_map: state must have dimension d^2");
    const int ns = d == 2 ? 1 : 2;
    if ((1 << ns) != d) throw DimensionMismatch("extract_map: d must be 2 or 4");

    SuperOperator S;
    S.tau = tau;
    S.m.resize(d * d, d * d);
    for (int m = 0; m < d; ++m) {
        const double sm = choi_pair_sign(m, ns);
        const int pm = ~m & (d - 1);
        for (int n = 0; n < d; ++n) {
            const double sn = choi_pair_sign(n, ns);
            const int pn = ~n & (d - 1);
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    S.m(l * d + k, n * d + m) = double(d) * sm * sn * evolved_choi_state(k * d + pm, l * d + pn);
        }
    }

    if (opts.check) {
        const double cp = choi_min_eigenvalue(S);
        if (cp < opts.cp_violation_threshold)
            throw CPViolation("extract_map: Choi minimum eigenvalue " + std::to_string(cp) +
                              " (sign convention or chain length error)");
        const double tp = trace_preservation_residual(S);
        if (tp > opts.tp_violation_threshold)
            throw CPViolation("extract_map: trace preservation residual " + std::to_string(tp));
    }
    return S;
}

// Central-difference TCL generator L(tau) = dΛ/dτ Λ^{-1} on a uniform grid.
inline SuperOperator tcl_generator(const std::vector<SuperOperator>& maps, int index,
                                   double cond_threshold = 1e12) {
    const int n = static_cast<int>(maps.size());
    if (n < 3) throw Error("tcl_generator: need at least 3 samples");
    if (index < 0 || index >= n) throw Error("tcl_generator: index out of range");
    const double dt = maps[1].tau - maps[0].tau;

    Eigen::MatrixXcd deriv;
    if (index == 0)
        deriv = (-3.0 * maps[0].m + 4.0 * maps[1].m - maps[2].m) / (2.0 * dt);
    else if (index == n - 1)
        deriv = (3.0 * maps[n - 1].m - 4.0 * maps[n - 2].m + maps[n - 3].m) / (2.0 * dt);
    else
        deriv = (maps[index + 1].m - maps[index - 1].m) / (2.0 * dt);

    const Eigen::MatrixXcd& lam = maps[index].m;
    if (condition_number(lam) > cond_threshold)
        throw SingularMap("tcl_generator: map is singular at tau=" + std::to_string(maps[index].tau));
    return {deriv * lam.inverse(), maps[index].tau};
}

// Right eigenoperator of the (numerically unique) zero eigenvalue, Hermitized
// and normalized to unit trace.
inline Eigen::MatrixXcd fixed_point(const SuperOperator& L, double rel_tol = 1e-6) {
    const int d = L.dim();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L.m);
    if (es.info() != Eigen::Success) throw Error("fixed_point: eigensolver failed");
    const Eigen::VectorXcd& ev = es.eigenvalues();
    const double radius = ev.cwiseAbs().maxCoeff();
    const double tol = rel_tol * std::max(radius, 1e-300);

    int best = -1;
    int candidates = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) < tol) {
            ++candidates;
            if (best < 0 || std::abs(ev(i)) < std::abs(ev(best))) best = i;
        }
    }
    if (candidates == 0) throw DegenerateFixedPoint("fixed_point: no eigenvalue within tolerance of zero");
    if (candidates > 1) throw DegenerateFixedPoint("fixed_point: multiple candidate null eigenvalues");

    Eigen::MatrixXcd X = unvec(es.eigenvectors().col(best), d);
    X = 0.5 * (X + X.adjoint()).eval();
    const double tr = X.trace().real();
    if (std::abs(tr) < 1e-14) throw ZeroTrace("fixed_point: traceless null eigenoperator");
    return X / tr;
}

// Single dot: the nonzero eigenvalue of the population block of L.
// Double dot: all eigenvalues sorted by |Re| ascending.
inline std::vector<std::complex<double>> instantaneous_rates(const SuperOperator& L) {
    const int d = L.dim();
    if (d == 2) {
        // population block spans vec indices of |0><0| and |1><1|
        Eigen::Matrix2cd B;
        B << L.m(0, 0), L.m(0, 3), L.m(3, 0), L.m(3, 3);
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(B);
        std::complex<double> a = es.eigenvalues()(0), b = es.eigenvalues()(1);
        return {std::abs(a) > std::abs(b) ? a : b};
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L.m);
    std::vector<std::complex<double>> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](auto x, auto y) { return std::abs(x.real()) < std::abs(y.real()); });
    return out;
}

inline std::complex<double> instantaneous_rate(const SuperOperator& L) { return instantaneous_rates(L).front(); }

enum class NormKind { TraceNorm };

struct MemoryTimes {
    double tau_L = 0.0;
    double tau_Lambda = 0.0;
    double epsilon = 0.0;
    NormKind norm_kind = NormKind::TraceNorm;
};

// Convergence criteria for the two memory times. Distances are measured with
// the trace-distance normalization T = (1/2)||·||_1, the same norm the trace
// distance uses; the generator criterion is scaled by a reference rate so
// that epsilon compares like-for-like with the map criterion.
inline MemoryTimes memory_times(const std::vector<SuperOperator>& map_samples,
                                const std::vector<SuperOperator>& generator_samples, const Eigen::MatrixXcd& rho_ss,
                                double epsilon, double reference_rate) {
    if (map_samples.empty() || generator_samples.empty()) throw Error("memory_times: empty sample set");
    MemoryTimes mt;
    mt.epsilon = epsilon;

    auto scan = [&](const std::vector<SuperOperator>& samples, auto&& deviation) -> double {
        int first_ok = static_cast<int>(samples.size());
        for (int i = static_cast<int>(samples.size()) - 1; i >= 0; --i) {
            if (deviation(samples[i]) < epsilon)
                first_ok = i;
            else
                break;
        }
        if (first_ok == static_cast<int>(samples.size()))
            throw NotConverged("memory_times: criterion not met within the sampled window");
        return samples[first_ok].tau;
    };

    mt.tau_Lambda = scan(map_samples, [&](const SuperOperator& S) {
        return 0.5 * trace_norm(act(S, rho_ss) - rho_ss);
    });
    mt.tau_L = scan(generator_samples, [&](const SuperOperator& L) {
        return 0.5 * trace_norm(act(L, rho_ss)) / std::max(reference_rate, 1e-300);
    });
    return mt;
}

// Λ at the sample nearest tau_L; advances past isolated singular samples.
inline SuperOperator slippage(const std::vector<SuperOperator>& map_samples, double tau_L,
                              double cond_threshold = 1e12, int window = 10) {
    if (map_samples.empty()) throw Error("slippage: no samples");
    int idx = 0;
    double best = std::numeric_limits<double>::max();
    for (int i = 0; i < static_cast<int>(map_samples.size()); ++i) {
        const double dist = std::abs(map_samples[i].tau - tau_L);
        if (dist < best) {
            best = dist;
            idx = i;
        }
    }
    for (int j = 0; j < window && idx + j < static_cast<int>(map_samples.size()); ++j) {
        if (condition_number(map_samples[idx + j].m) < cond_threshold) return map_samples[idx + j];
    }
    throw SingularMap("slippage: no invertible sample within the search window");
}

}  // namespace nmq
