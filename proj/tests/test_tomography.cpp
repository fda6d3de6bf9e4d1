#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include "nmq/bath.hpp"
#include "nmq/gaussian.hpp"
#include "nmq/tomography.hpp"

using namespace nmq;
using Eigen::MatrixXcd;
using cplx = std::complex<double>;

namespace {

// amplitude damping + pumping + dephasing on a qubit, with known stationary
// state p = up/(up+down) and relaxation eigenvalue -(up+down)
SuperOperator qubit_lindblad(double eps, double down, double up, double dephase) {
    MatrixXcd H = MatrixXcd::Zero(2, 2);
    H(1, 1) = eps;
    MatrixXcd sm(2, 2), sp(2, 2), sz(2, 2);
    sm << 0, 1, 0, 0;
    sp << 0, 0, 1, 0;
    sz << 1, 0, 0, -1;
    auto dissipator = [](const MatrixXcd& A) {
        const int d = static_cast<int>(A.rows());
        MatrixXcd AdA = A.adjoint() * A;
        return sandwich_superop(A, A.adjoint()) -
               0.5 * (sandwich_superop(AdA, MatrixXcd::Identity(d, d)) +
                      sandwich_superop(MatrixXcd::Identity(d, d), AdA));
    };
    MatrixXcd L = commutator_generator(H) + down * dissipator(sm) + up * dissipator(sp) + dephase * dissipator(sz);
    return {L, 0.0};
}

std::vector<SuperOperator> markovian_samples(const SuperOperator& L, double dt, int n) {
    std::vector<SuperOperator> out;
    for (int i = 0; i < n; ++i) {
        MatrixXcd lam = (L.m * (dt * i)).exp();
        out.push_back({lam, dt * i});
    }
    return out;
}

struct TinyRun {
    ModeLayout layout;
    Propagator prop;
    MatrixXcd C0;
};

TinyRun tiny_choi_run(const SystemSpec& sys, double gamma, double beta, double mu, int n_b, double rescale) {
    SpectralDensity sd{std::max(gamma, 1.0), 1.0};
    BathSpec bath{sd, beta, mu, n_b};
    auto [f, e] = thermofield_split(bath);
    const double factor = gamma > 0 ? gamma / sd.gamma : 0.0;
    BathChains c{rescale_first_site(chain_coefficients(f, n_b, 1000), factor * rescale),
                 rescale_first_site(chain_coefficients(e, n_b, 1000), factor * rescale)};
    const int n_baths = sys.n_modes;
    ModeLayout layout = ModeLayout::make(sys.n_modes, n_baths, n_b + 1);
    std::vector<BathChains> chains(n_baths, c);
    MatrixXcd h = assemble_hamiltonian(sys, chains, layout);
    MatrixXcd C0 = initial_correlation_matrix(layout, true);
    return {layout, Propagator(h), C0};
}

}  // namespace

TEST_CASE("Choi pair signs and reference state", "[tomography]") {
    REQUIRE(choi_pair_sign(0, 1) == 1.0);
    REQUIRE(choi_pair_sign(1, 1) == 1.0);
    REQUIRE(choi_pair_sign(0b00, 2) == 1.0);
    REQUIRE(choi_pair_sign(0b01, 2) == -1.0);
    REQUIRE(choi_pair_sign(0b10, 2) == 1.0);
    REQUIRE(choi_pair_sign(0b11, 2) == 1.0);

    // the Gaussian Bell blocks must reproduce the exact fermionic pair state
    for (int ns : {1, 2}) {
        const int k = 2 * ns;
        MatrixXcd C = MatrixXcd::Zero(k, k);
        for (int i = 0; i < ns; ++i) {
            C(i, i) = 0.5;
            C(ns + i, ns + i) = 0.5;
            C(i, ns + i) = 0.5;
            C(ns + i, i) = 0.5;
        }
        MatrixXcd rho = gaussian_rdm(C);
        MatrixXcd ref = choi_reference_state(ns);
        REQUIRE((rho - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("Map extraction at tau = 0 is the identity", "[tomography]") {
    for (int ns : {1, 2}) {
        MatrixXcd rho = choi_reference_state(ns);
        SuperOperator S = extract_map(rho, 1 << ns);
        REQUIRE((S.m - MatrixXcd::Identity(S.m.rows(), S.m.cols())).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("Decoupled system gives the unitary channel", "[tomography]") {
    SECTION("single dot") {
        SystemSpec sys;
        sys.n_modes = 1;
        sys.epsilon = Eigen::VectorXd::Constant(1, 0.7);
        TinyRun run = tiny_choi_run(sys, 0.0, 3.0, 0.0, 2, 1.0);
        for (double tau : {0.9, 3.7}) {
            MatrixXcd rho = reduced_density_matrix(run.prop.evolve(run.C0, tau), run.layout.system_ancilla_indices());
            SuperOperator S = extract_map(rho, 2, tau);
            MatrixXcd U = (cplx(0, -1) * tau * sys.single_particle()).exp();
            FockSpace f(1);
            MatrixXcd Ubig = (cplx(0, -1) * tau * f.quadratic(sys.single_particle())).exp();
            REQUIRE(map_distance(S, unitary_channel(Ubig)) < 1e-9);
        }
    }
    SECTION("double dot with hopping and detuning") {
        SystemSpec sys;
        sys.n_modes = 2;
        sys.epsilon = Eigen::VectorXd::Zero(2);
        sys.epsilon << 0.1, -0.2;
        sys.hopping_g = 0.13;
        TinyRun run = tiny_choi_run(sys, 0.0, 3.0, 0.0, 2, 1.0);
        FockSpace f(2);
        MatrixXcd H = f.quadratic(sys.single_particle());
        for (double tau : {1.3, 5.1}) {
            MatrixXcd rho = reduced_density_matrix(run.prop.evolve(run.C0, tau), run.layout.system_ancilla_indices());
            SuperOperator S = extract_map(rho, 4, tau);
            MatrixXcd Ubig = (cplx(0, -1) * tau * H).exp();
            REQUIRE(map_distance(S, unitary_channel(Ubig)) < 1e-9);
            REQUIRE(trace_preservation_residual(S) < 1e-10);
            REQUIRE(choi_min_eigenvalue(S) > -1e-9);
        }
    }
}

TEST_CASE("Corrupted sign convention is caught as a CP violation", "[tomography]") {
    SystemSpec sys;
    sys.n_modes = 2;
    sys.epsilon = Eigen::VectorXd::Zero(2);
    sys.hopping_g = 0.3;
    TinyRun run = tiny_choi_run(sys, 0.8, 2.0, 0.1, 2, 1.0);
    const double tau = 4.0;
    MatrixXcd rho = reduced_density_matrix(run.prop.evolve(run.C0, tau), run.layout.system_ancilla_indices());
    // flip the fermionic reordering sign of the |01> sector: this corrupts the
    // unfolding exactly the way a wrong string convention would
    MatrixXcd rho_bad = rho;
    const int d = 4;
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    double s = 1.0;
                    if ((~a & (d - 1)) == 0b01) s *= -1.0;
                    if ((~b & (d - 1)) == 0b01) s *= -1.0;
                    rho_bad(k * d + a, l * d + b) = s * rho(k * d + a, l * d + b);
                }
    REQUIRE_NOTHROW(extract_map(rho, d, tau));
    REQUIRE_THROWS_AS(extract_map(rho_bad, d, tau), CPViolation);
}

TEST_CASE("TCL generator recovers a Markovian generator", "[tomography]") {
    SuperOperator L = qubit_lindblad(0.8, 0.6, 0.25, 0.1);
    auto samples = markovian_samples(L, 0.01, 400);
    for (int idx : {0, 5, 200, 399}) {
        SuperOperator Lrec = tcl_generator(samples, idx);
        REQUIRE((Lrec.m - L.m).cwiseAbs().maxCoeff() < 1e-4);
    }
    REQUIRE(trace_annihilation_residual(tcl_generator(samples, 100)) < 1e-6);
}

TEST_CASE("Fixed point of a known generator", "[tomography]") {
    const double down = 0.6, up = 0.25;
    SuperOperator L = qubit_lindblad(0.5, down, up, 0.05);
    MatrixXcd rho = fixed_point(L);
    REQUIRE(rho(1, 1).real() == Catch::Approx(up / (up + down)).margin(1e-8));
    REQUIRE(std::abs(rho(0, 1)) < 1e-10);
    REQUIRE(rho.trace().real() == Catch::Approx(1.0).margin(1e-12));

    // closed system: every diagonal state is fixed
    MatrixXcd H = MatrixXcd::Zero(2, 2);
    H(1, 1) = 0.3;
    SuperOperator Lfree{commutator_generator(H), 0.0};
    REQUIRE_THROWS_AS(fixed_point(Lfree), DegenerateFixedPoint);
}

TEST_CASE("Instantaneous rates", "[tomography]") {
    const double down = 0.6, up = 0.25;
    SuperOperator L = qubit_lindblad(0.5, down, up, 0.0);
    auto rate = instantaneous_rate(L);
    REQUIRE(rate.real() == Catch::Approx(-(down + up)).margin(1e-10));
    REQUIRE(std::abs(rate.imag()) < 1e-10);

    // free double dot: rates are 0 or +-i (Bohr frequencies)
    SystemSpec sys;
    sys.n_modes = 2;
    sys.epsilon = Eigen::VectorXd::Zero(2);
    sys.hopping_g = 0.1;
    FockSpace f(2);
    SuperOperator Lfree{commutator_generator(f.quadratic(sys.single_particle())), 0.0};
    auto rates = instantaneous_rates(Lfree);
    REQUIRE(rates.size() == 16);
    for (const auto& r : rates) REQUIRE(std::abs(r.real()) < 1e-12);
}

TEST_CASE("Memory times on synthetic inputs", "[tomography]") {
    SuperOperator L = qubit_lindblad(0.3, 0.6, 0.25, 0.0);
    auto maps = markovian_samples(L, 0.05, 200);
    std::vector<SuperOperator> gens;
    for (int i = 0; i < 200; ++i) gens.push_back({L.m, 0.05 * i});
    MatrixXcd rho_ss = fixed_point(L);

    MemoryTimes mt = memory_times(maps, gens, rho_ss, 1e-3, std::abs(instantaneous_rate(L).real()));
    REQUIRE(mt.tau_L == 0.0);       // time-independent generator
    REQUIRE(mt.tau_Lambda == 0.0);  // stationary input never moves
    REQUIRE(mt.tau_L <= mt.tau_Lambda);

    // a generator trace that never settles
    std::vector<SuperOperator> wobble;
    for (int i = 0; i < 200; ++i) {
        SuperOperator Li = qubit_lindblad(0.3, 0.6 + 0.3 * std::sin(0.3 * i), 0.25, 0.0);
        Li.tau = 0.05 * i;
        wobble.push_back(Li);
    }
    REQUIRE_THROWS_AS(memory_times(maps, wobble, rho_ss, 1e-3, 1.0), NotConverged);
}

TEST_CASE("Slippage selection skips singular samples", "[tomography]") {
    SuperOperator L = qubit_lindblad(0.0, 0.5, 0.2, 0.0);
    auto maps = markovian_samples(L, 0.1, 50);
    // corrupt the sample nearest tau = 2.0
    maps[20].m.row(0).setZero();
    SuperOperator S = slippage(maps, 2.0);
    REQUIRE(S.tau == Catch::Approx(2.1));

    // Markovian slippage commutes with the generator: S = e^{L tau}
    MatrixXcd expected = (L.m * 2.1).exp();
    REQUIRE((S.m - expected).cwiseAbs().maxCoeff() < 1e-12);

    for (auto& s : maps) s.m.row(0).setZero();
    REQUIRE_THROWS_AS(slippage(maps, 2.0), SingularMap);
}
