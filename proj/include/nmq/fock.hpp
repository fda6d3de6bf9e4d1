// fock.hpp — dense many-body operators for a handful of fermionic modes.
// Jordan-Wigner convention: mode 0 is the most significant bit of the Fock
// index, creation operators in |n_0 n_1 ...> are applied in mode order, and
// c_i picks up (-1)^(number of occupied modes j < i).
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nmq/errors.hpp"

namespace nmq {

class FockSpace {
  public:
    explicit FockSpace(int n_modes) : n_(n_modes) {
        if (n_modes < 1 || n_modes > 14) throw ModeCountTooLarge("FockSpace: supports 1..14 modes");
        dim_ = 1 << n_modes;
        c_.resize(n_modes);
        for (int i = 0; i < n_modes; ++i) {
            Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim_, dim_);
            const int pos = n_ - 1 - i;  // bit position of mode i
            for (int b = 0; b < dim_; ++b) {
                if (!(b >> pos & 1)) continue;
                const int target = b & ~(1 << pos);
                const int higher = b >> (pos + 1);  // modes j < i
                const double sign = (__builtin_popcount(higher) & 1) ? -1.0 : 1.0;
                op(target, b) = sign;
            }
            c_[i] = op;
        }
    }

    int n_modes() const { return n_; }
    int dim() const { return dim_; }

    const Eigen::MatrixXcd& annihilation(int i) const { return c_.at(i); }
    Eigen::MatrixXcd creation(int i) const { return c_.at(i).adjoint(); }
    Eigen::MatrixXcd number(int i) const { return c_.at(i).adjoint() * c_.at(i); }

    // Σ_ij M_ij c_i† c_j
    Eigen::MatrixXcd quadratic(const Eigen::MatrixXcd& M) const {
        if (M.rows() != n_ || M.cols() != n_) throw DimensionMismatch("FockSpace::quadratic: size mismatch");
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim_, dim_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (std::abs(M(i, j)) > 0.0) H += M(i, j) * (c_[i].adjoint() * c_[j]);
        return H;
    }

    // total particle number of a basis state
    int occupation(int basis_index) const { return __builtin_popcount(basis_index); }

  private:
    int n_;
    int dim_;
    std::vector<Eigen::MatrixXcd> c_;
};

// Partial trace over a subset of qubits/modes, keeping the listed ones in
// their current relative order. Operates on the 2^n tensor index directly.
inline Eigen::MatrixXcd partial_trace_keep(const Eigen::MatrixXcd& rho, int n_modes, const std::vector<int>& keep) {
    const int dim = 1 << n_modes;
    if (rho.rows() != dim || rho.cols() != dim) throw DimensionMismatch("partial_trace_keep: size mismatch");
    const int k = static_cast<int>(keep.size());
    const int dk = 1 << k;
    std::vector<int> rest;
    for (int m = 0; m < n_modes; ++m)
        if (std::find(keep.begin(), keep.end(), m) == keep.end()) rest.push_back(m);
    auto build = [&](int kept_bits, int rest_bits) {
        int idx = 0;
        for (int a = 0; a < k; ++a)
            if (kept_bits >> (k - 1 - a) & 1) idx |= 1 << (n_modes - 1 - keep[a]);
        for (std::size_t r = 0; r < rest.size(); ++r)
            if (rest_bits >> (static_cast<int>(rest.size()) - 1 - static_cast<int>(r)) & 1)
                idx |= 1 << (n_modes - 1 - rest[r]);
        return idx;
    };
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    const int dr = 1 << rest.size();
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b) {
            std::complex<double> s = 0.0;
            for (int r = 0; r < dr; ++r) s += rho(build(a, r), build(b, r));
            out(a, b) = s;
        }
    return out;
}

}  // namespace nmq
