// gaussian.hpp — single-particle Hamiltonian assembly for system + ancillas +
// thermofield chains, exact correlation-matrix propagation, and reconstruction
// of reduced density operators and observables.
#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "nmq/bath.hpp"
#include "nmq/errors.hpp"
#include "nmq/fock.hpp"

namespace nmq {

struct SystemSpec {
    int n_modes = 1;                          // 1 (QD) or 2 (DQD)
    Eigen::VectorXd epsilon;                  // on-site energies, units of D
    double hopping_g = 0.0;                   // inter-dot hopping (0 for a single dot)
    double interaction_u = 0.0;               // must be 0: quadratic dynamics only

    void validate() const {
        if (n_modes != 1 && n_modes != 2) throw ConfigError("SystemSpec: n_modes must be 1 or 2");
        if (epsilon.size() != n_modes) throw DimensionMismatch("SystemSpec: epsilon size mismatch");
        if (interaction_u != 0.0)
            throw UnsupportedInteraction("SystemSpec: interacting dynamics (U != 0) is not supported");
    }

    // single-particle matrix of H_S
    Eigen::MatrixXcd single_particle() const {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n_modes, n_modes);
        for (int i = 0; i < n_modes; ++i) h(i, i) = epsilon(i);
        if (n_modes == 2) {
            h(0, 1) = hopping_g;
            h(1, 0) = hopping_g;
        }
        return h;
    }
};

enum class ModeRole { ChainLf, ChainLe, System, Ancilla, ChainRf, ChainRe };

// 1D ordering: left chains (interleaved filled/empty, far end first so the
// system-coupled site sits next to the system block), system modes, ancilla
// modes, right chains. Ancillas sit between the system and the right chains;
// everything left of the system stays left of it, which is what the
// Choi-unfolding sign conventions assume.
struct ModeLayout {
    int n_system = 1;
    int n_baths = 1;      // 1: left only, 2: left and right
    int chain_sites = 0;  // sites per thermofield branch (N_b + 1)
    std::vector<ModeRole> roles;

    static ModeLayout make(int n_system, int n_baths, int chain_sites) {
        if (n_baths < 1 || n_baths > 2) throw ConfigError("ModeLayout: n_baths must be 1 or 2");
        ModeLayout l;
        l.n_system = n_system;
        l.n_baths = n_baths;
        l.chain_sites = chain_sites;
        for (int s = chain_sites - 1; s >= 0; --s) {
            l.roles.push_back(ModeRole::ChainLf);
            l.roles.push_back(ModeRole::ChainLe);
        }
        for (int i = 0; i < n_system; ++i) l.roles.push_back(ModeRole::System);
        for (int i = 0; i < n_system; ++i) l.roles.push_back(ModeRole::Ancilla);
        if (n_baths == 2)
            for (int s = 0; s < chain_sites; ++s) {
                l.roles.push_back(ModeRole::ChainRf);
                l.roles.push_back(ModeRole::ChainRe);
            }
        return l;
    }

    int total() const { return static_cast<int>(roles.size()); }
    int system(int i) const { return 2 * chain_sites + i; }
    int ancilla(int i) const { return 2 * chain_sites + n_system + i; }
    // side 0 = left, 1 = right; branch 0 = filled, 1 = empty; site 0 couples to the system
    int chain(int side, int branch, int site) const {
        if (side == 0) return 2 * (chain_sites - 1 - site) + branch;
        return 2 * chain_sites + 2 * n_system + 2 * site + branch;
    }
    std::vector<int> system_ancilla_indices() const {
        std::vector<int> v;
        for (int i = 0; i < n_system; ++i) v.push_back(system(i));
        for (int i = 0; i < n_system; ++i) v.push_back(ancilla(i));
        return v;
    }
};

// Chain coefficients for the filled and empty branches of one bath.
struct BathChains {
    ChainCoefficients filled;
    ChainCoefficients empty;
};

// Single-particle matrix h of the full chain-mapped Hamiltonian. Ancilla rows
// and columns stay zero: the ancillas are dynamically decoupled and their
// on-site phase drops out of the reconstructed channel.
inline Eigen::MatrixXcd assemble_hamiltonian(const SystemSpec& sys, const std::vector<BathChains>& chains,
                                             const ModeLayout& layout) {
    sys.validate();
    if (static_cast<int>(chains.size()) != layout.n_baths)
        throw DimensionMismatch("assemble_hamiltonian: bath count mismatch");
    if (layout.n_system != sys.n_modes) throw DimensionMismatch("assemble_hamiltonian: system size mismatch");

    const int M = layout.total();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(M, M);

    for (int i = 0; i < sys.n_modes; ++i) h(layout.system(i), layout.system(i)) = sys.epsilon(i);
    if (sys.n_modes == 2) {
        h(layout.system(0), layout.system(1)) = sys.hopping_g;
        h(layout.system(1), layout.system(0)) = sys.hopping_g;
    }

    for (int side = 0; side < layout.n_baths; ++side) {
        // left bath couples to the first system mode, right bath to the last
        const int s = layout.system(side == 0 ? 0 : sys.n_modes - 1);
        for (int branch = 0; branch < 2; ++branch) {
            const ChainCoefficients& c = branch == 0 ? chains[side].filled : chains[side].empty;
            if (c.onsite.size() != layout.chain_sites)
                throw DimensionMismatch("assemble_hamiltonian: chain length inconsistent with layout");
            // +kappa for the filled branch, -kappa for the empty branch
            const double sign = branch == 0 ? 1.0 : -1.0;
            const int first = layout.chain(side, branch, 0);
            h(s, first) = sign * c.sys_coupling;
            h(first, s) = sign * c.sys_coupling;
            for (int n = 0; n < layout.chain_sites; ++n) {
                const int idx = layout.chain(side, branch, n);
                h(idx, idx) = c.onsite(n);
                if (n + 1 < layout.chain_sites) {
                    const int nxt = layout.chain(side, branch, n + 1);
                    h(idx, nxt) = c.hopping(n);
                    h(nxt, idx) = c.hopping(n);
                }
            }
        }
    }
    return h;
}

// Initial correlation matrix C_ij = <o_j† o_i>: filled chains occupied, empty
// chains empty. If choi is set, each (system, ancilla) pair carries the
// particle-hole-transformed Bell pair (c_S† + c_A†)/sqrt(2)|vac>; otherwise the
// system block is a caller-specified single-particle matrix <s_j† s_i> and the
// ancillas stay empty.
inline Eigen::MatrixXcd initial_correlation_matrix(const ModeLayout& layout, bool choi,
                                                   const Eigen::MatrixXcd& system_block = Eigen::MatrixXcd()) {
    const int M = layout.total();
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(M, M);
    for (int side = 0; side < layout.n_baths; ++side)
        for (int site = 0; site < layout.chain_sites; ++site) C(layout.chain(side, 0, site), layout.chain(side, 0, site)) = 1.0;

    if (choi) {
        for (int i = 0; i < layout.n_system; ++i) {
            const int s = layout.system(i), a = layout.ancilla(i);
            C(s, s) = 0.5;
            C(a, a) = 0.5;
            C(s, a) = 0.5;
            C(a, s) = 0.5;
        }
    } else if (system_block.size() > 0) {
        if (system_block.rows() != layout.n_system || system_block.cols() != layout.n_system)
            throw DimensionMismatch("initial_correlation_matrix: system block size mismatch");
        for (int i = 0; i < layout.n_system; ++i)
            for (int j = 0; j < layout.n_system; ++j) C(layout.system(i), layout.system(j)) = system_block(i, j);
    }
    return C;
}

// Exact propagation C(t) = e^{iht} C(0) e^{-iht} by one-time eigendecomposition.
class Propagator {
  public:
    explicit Propagator(const Eigen::MatrixXcd& h) {
        if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw DimensionMismatch("Propagator: h must be Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        if (es.info() != Eigen::Success) throw Error("Propagator: eigendecomposition failed");
        E_ = es.eigenvalues();
        V_ = es.eigenvectors();
    }

    const Eigen::VectorXd& spectrum() const { return E_; }

    Eigen::MatrixXcd unitary(double tau) const {
        Eigen::VectorXcd ph(E_.size());
        for (int i = 0; i < E_.size(); ++i) ph(i) = std::polar(1.0, E_(i) * tau);
        return V_ * ph.asDiagonal() * V_.adjoint();
    }

    Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& C0, double tau) const {
        Eigen::MatrixXcd U = unitary(tau);
        return U * C0 * U.adjoint();
    }

    // Repeated evaluation of a fixed block of C(t) for one initial condition:
    // C_sel(t) = W(t) B W(t)†, with W(t) = V_sel e^{iEt} and B = V† C0 V.
    class BlockSampler {
      public:
        BlockSampler(const Propagator& p, const Eigen::MatrixXcd& C0, std::vector<int> sel)
            : E_(p.E_), sel_(std::move(sel)) {
            W_.resize(static_cast<int>(sel_.size()), p.V_.rows());
            for (int r = 0; r < W_.rows(); ++r) W_.row(r) = p.V_.row(sel_[r]);
            B_ = p.V_.adjoint() * C0 * p.V_;
        }

        Eigen::MatrixXcd block(double tau) const {
            Eigen::VectorXcd ph(E_.size());
            for (int i = 0; i < E_.size(); ++i) ph(i) = std::polar(1.0, E_(i) * tau);
            Eigen::MatrixXcd Wt = W_ * ph.asDiagonal();
            Eigen::MatrixXcd T = Wt * B_;
            return T * Wt.adjoint();
        }

      private:
        Eigen::VectorXd E_;
        std::vector<int> sel_;
        Eigen::MatrixXcd W_;
        Eigen::MatrixXcd B_;
    };

    BlockSampler block_sampler(const Eigen::MatrixXcd& C0, std::vector<int> sel) const {
        return BlockSampler(*this, C0, std::move(sel));
    }

  private:
    Eigen::VectorXd E_;
    Eigen::MatrixXcd V_;
};

// Reduced density operator of the modes behind a correlation block, as the
// explicit 2^k Fock-space matrix:
//   rho = det(1 - C^T) exp( Σ_ij [log(C^T (1-C^T)^{-1})]_ij  c_i† c_j ).
// Block eigenvalues are clamped away from {0,1} before the logarithm.
inline Eigen::MatrixXcd gaussian_rdm(const Eigen::MatrixXcd& C_block, double clamp = 1e-12) {
    const int k = static_cast<int>(C_block.rows());
    if (k > 8) throw ModeCountTooLarge("gaussian_rdm: more than 8 modes requested");
    Eigen::MatrixXcd A = C_block.transpose();
    A = 0.5 * (A + A.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    Eigen::VectorXd p = es.eigenvalues();
    double logdet = 0.0;
    Eigen::VectorXd lg(k);
    for (int i = 0; i < k; ++i) {
        const double pi = std::clamp(p(i), clamp, 1.0 - clamp);
        lg(i) = std::log(pi / (1.0 - pi));
        logdet += std::log1p(-pi);
    }
    Eigen::MatrixXcd Mlog = es.eigenvectors() * lg.asDiagonal() * es.eigenvectors().adjoint();

    FockSpace fock(k);
    Eigen::MatrixXcd K = fock.quadratic(Mlog);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ek(0.5 * (K + K.adjoint()));
    Eigen::VectorXd ex = ek.eigenvalues();
    Eigen::VectorXd scaled(ex.size());
    for (int i = 0; i < ex.size(); ++i) scaled(i) = std::exp(ex(i) + logdet);
    Eigen::MatrixXcd rho = ek.eigenvectors() * scaled.asDiagonal() * ek.eigenvectors().adjoint();
    return 0.5 * (rho + rho.adjoint());
}

inline Eigen::MatrixXcd reduced_density_matrix(const Eigen::MatrixXcd& C, const std::vector<int>& modes) {
    const int k = static_cast<int>(modes.size());
    Eigen::MatrixXcd block(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) block(i, j) = C(modes[i], modes[j]);
    return gaussian_rdm(block);
}

inline double population(const Eigen::MatrixXcd& C, int mode) { return C(mode, mode).real(); }

// <J> = i Tr[rho (s_i† s_j - s_j† s_i)] with C_ij = <o_j† o_i>
inline double current(const Eigen::MatrixXcd& C, int mode_i, int mode_j) {
    const std::complex<double> v =
        std::complex<double>(0.0, 1.0) * (C(mode_j, mode_i) - C(mode_i, mode_j));
    return v.real();
}

inline double current_from_density(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& Jop) {
    return (Jop * rho).trace().real();
}

inline double trace_norm(const Eigen::MatrixXcd& A) {
    return A.jacobiSvd().singularValues().sum();
}

// T[rho1, rho2] = (1/2) Σ singular values of the difference
inline double trace_distance(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2) {
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
        throw DimensionMismatch("trace_distance: dimension mismatch");
    return 0.5 * trace_norm(rho1 - rho2);
}

inline double min_eigenvalue(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
    return es.eigenvalues().minCoeff();
}

}  // namespace nmq
