// superop.hpp — linear maps on system operators in a fixed column-stacking
// vectorization: vec(X)_{j*d+i} = X_ij, so vec(A X B) = (B^T ⊗ A) vec(X).
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "nmq/errors.hpp"
#include "nmq/gaussian.hpp"

namespace nmq {

struct SuperOperator {
    Eigen::MatrixXcd m;  // d^2 x d^2
    double tau = 0.0;

    int dim() const { return static_cast<int>(std::lround(std::sqrt(static_cast<double>(m.rows())))); }
};

inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& A) {
    return Eigen::Map<const Eigen::VectorXcd>(A.data(), A.size());
}

inline Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int d) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

inline Eigen::MatrixXcd act(const SuperOperator& S, const Eigen::MatrixXcd& rho) {
    const int d = static_cast<int>(rho.rows());
    if (S.m.rows() != d * d) throw DimensionMismatch("apply: superoperator/state dimension mismatch");
    return unvec(S.m * vec(rho), d);
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

inline SuperOperator identity_superop(int d) {
    return {Eigen::MatrixXcd::Identity(d * d, d * d), 0.0};
}

// X -> A X B
inline Eigen::MatrixXcd sandwich_superop(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    return kron(B.transpose(), A);
}

// generator of -i[H, ·]
inline Eigen::MatrixXcd commutator_generator(const Eigen::MatrixXcd& H) {
    const int d = static_cast<int>(H.rows());
    const std::complex<double> mi(0.0, -1.0);
    return mi * (sandwich_superop(H, Eigen::MatrixXcd::Identity(d, d)) -
                 sandwich_superop(Eigen::MatrixXcd::Identity(d, d), H));
}

// channel X -> U X U†
inline SuperOperator unitary_channel(const Eigen::MatrixXcd& U, double tau = 0.0) {
    return {sandwich_superop(U, U.adjoint()), tau};
}

// matrix of the map X -> (T[X†])†, used to add "+ h.c." at the superoperator level
inline Eigen::MatrixXcd hermitian_conjugate_superop(const Eigen::MatrixXcd& T) {
    const int dd = static_cast<int>(T.rows());
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dd))));
    Eigen::MatrixXcd SW = Eigen::MatrixXcd::Zero(dd, dd);  // vec(X†) = SW conj(vec X)
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) SW(j * d + i, i * d + j) = 1.0;
    return SW * T.conjugate() * SW;
}

// Choi matrix (trace normalized to 1): C_{(k,m),(l,n)} = (1/d) Λ[|m><n|]_{kl}
inline Eigen::MatrixXcd choi_matrix(const SuperOperator& S) {
    const int d = S.dim();
    Eigen::MatrixXcd C(d * d, d * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) C(k * d + m, l * d + n) = S.m(l * d + k, n * d + m) / double(d);
    return C;
}

inline double choi_min_eigenvalue(const SuperOperator& S) {
    Eigen::MatrixXcd C = choi_matrix(S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (C + C.adjoint()));
    return es.eigenvalues().minCoeff();
}

// trace preservation: vec(1)† S = vec(1)†
inline double trace_preservation_residual(const SuperOperator& S) {
    const int d = S.dim();
    Eigen::VectorXcd id = vec(Eigen::MatrixXcd::Identity(d, d));
    return (S.m.adjoint() * id - id).cwiseAbs().maxCoeff();
}

// trace annihilation (for generators): vec(1)† L = 0
inline double trace_annihilation_residual(const SuperOperator& L) {
    const int d = L.dim();
    Eigen::VectorXcd id = vec(Eigen::MatrixXcd::Identity(d, d));
    return (L.m.adjoint() * id).cwiseAbs().maxCoeff();
}

inline double condition_number(const Eigen::MatrixXcd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const double smin = svd.singularValues().minCoeff();
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues().maxCoeff() / smin;
}

// Distance between two maps: worst trace distance of outputs over a probe set
// of pure states (basis states and their pairwise +/i superpositions).
inline double map_distance(const SuperOperator& A, const SuperOperator& B) {
    const int d = A.dim();
    if (B.m.rows() != A.m.rows()) throw DimensionMismatch("map_distance: dimension mismatch");
    double worst = 0.0;
    auto probe = [&](const Eigen::VectorXcd& psi) {
        Eigen::MatrixXcd rho = psi * psi.adjoint();
        worst = std::max(worst, trace_distance(act(A, rho), act(B, rho)));
    };
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
        e(i) = 1.0;
        probe(e);
        for (int j = i + 1; j < d; ++j) {
            Eigen::VectorXcd p = Eigen::VectorXcd::Zero(d), q = Eigen::VectorXcd::Zero(d);
            p(i) = p(j) = 1.0 / std::sqrt(2.0);
            q(i) = 1.0 / std::sqrt(2.0);
            q(j) = std::complex<double>(0.0, 1.0 / std::sqrt(2.0));
            probe(p);
            probe(q);
        }
    }
    return worst;
}

}  // namespace nmq
