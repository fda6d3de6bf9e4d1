#include <catch2/catch_amalgamated.hpp>

#include "nmq/bath.hpp"
#include "nmq/gaussian.hpp"
#include "nmq/redfield.hpp"
#include "nmq/tomography.hpp"

using namespace nmq;
using Eigen::MatrixXcd;
using cplx = std::complex<double>;

namespace {
SystemSpec single_dot(double eps) {
    SystemSpec s;
    s.n_modes = 1;
    s.epsilon = Eigen::VectorXd::Constant(1, eps);
    return s;
}
}  // namespace

TEST_CASE("Bath correlation functions", "[redfield]") {
    SpectralDensity sd{0.01, 1.0};

    SECTION("infinite temperature at tau = 0") {
        BathSpec bath{sd, 0.0, 0.0, 10};
        auto [cp, cm] = bath_correlation(bath, 0.0);
        const double expected = 0.01 / (2.0 * M_PI);  // (1/2) ∫ J = Γ D / (2π)
        REQUIRE(cp.real() == Catch::Approx(expected).margin(1e-12));
        REQUIRE(cm.real() == Catch::Approx(expected).margin(1e-12));
        REQUIRE(std::abs(cp.imag()) < 1e-14);
    }
    SECTION("matches direct adaptive quadrature") {
        BathSpec bath{sd, 10.0, 0.1, 10};
        BathCorrelation corr(bath, 2000);
        for (double tau : {0.7, 3.3, 11.0}) {
            cplx direct = quad::adaptive_gk<cplx>(
                [&](double w) { return sd(w) * bath.fermi(w) * std::polar(1.0, w * tau); }, -1.0, 1.0, 1e-13);
            REQUIRE(std::abs(corr.cplus(tau) - direct) < 1e-11);
            cplx direct_m = quad::adaptive_gk<cplx>(
                [&](double w) { return sd(w) * (1.0 - bath.fermi(w)) * std::polar(1.0, -w * tau); }, -1.0, 1.0,
                1e-13);
            REQUIRE(std::abs(corr.cminus(tau) - direct_m) < 1e-11);
        }
    }
    SECTION("band correlations decay within tens of inverse bandwidths") {
        BathSpec bath{sd, 0.0, 0.0, 10};
        BathCorrelation corr(bath, 2000);
        const double c0 = std::abs(corr.cplus(0.0));
        for (double tau : {22.0, 30.0, 60.0}) REQUIRE(std::abs(corr.cplus(tau)) < 0.05 * c0);
    }
    SECTION("conjugation symmetry") {
        BathSpec bath{sd, 10.0, 0.1, 10};
        BathCorrelation corr(bath, 1000);
        for (double tau : {0.5, 4.2}) {
            REQUIRE(std::abs(corr.cplus(-tau) - std::conj(corr.cplus(tau))) < 1e-15);
        }
    }
    SECTION("decay-criterion memory time is of the order of the band timescale") {
        BathSpec bath{sd, 10.0, 0.1, 10};
        const double tm = correlation_memory_time(bath);
        REQUIRE(tm > 5.0);
        REQUIRE(tm < 45.0);
    }
}

TEST_CASE("Redfield generator limits", "[redfield]") {
    SpectralDensity sd{0.01, 1.0};
    BathSpec bath{sd, 10.0, 0.1, 10};

    SECTION("tau = 0 is the bare commutator") {
        RedfieldGenerator gen(single_dot(0.3), {bath});
        SuperOperator L0 = gen.at(0.0);
        FockSpace f(1);
        MatrixXcd expected = commutator_generator(f.quadratic(single_dot(0.3).single_particle()));
        REQUIRE((L0.m - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("trace annihilation at all times") {
        RedfieldGenerator gen(single_dot(0.1), {bath});
        for (double tau : {0.5, 5.0, 25.0}) REQUIRE(trace_annihilation_residual(gen.at(tau)) < 1e-10);
    }
    SECTION("converged rate is the golden rule 2 pi J(eps)") {
        RedfieldGenerator gen(single_dot(0.0), {bath});
        SuperOperator Lm = gen.converged(400.0);
        const auto rate = instantaneous_rate(Lm);
        REQUIRE(rate.real() == Catch::Approx(-4.0 * sd.gamma / M_PI).margin(2e-6));
        MatrixXcd rho_ss = fixed_point(Lm);
        REQUIRE(rho_ss(1, 1).real() == Catch::Approx(bath.fermi(0.0)).margin(1e-6));
    }
}

TEST_CASE("Redfield matches exact chain dynamics at weak coupling", "[redfield][oracle]") {
    // operator-ordering pin: mandatory validation against the exact dynamics
    SpectralDensity sd{0.01, 1.0};
    BathSpec bath{sd, 10.0, 0.1, 60};

    SECTION("single dot populations, including nonzero dot energy") {
        SystemSpec sys = single_dot(0.2);
        auto [fw, ew] = thermofield_split(bath);
        std::vector<BathChains> chains{{chain_coefficients(fw, bath.n_modes, 1500),
                                        chain_coefficients(ew, bath.n_modes, 1500)}};
        ModeLayout layout = ModeLayout::make(1, 1, bath.n_modes + 1);
        Propagator prop(assemble_hamiltonian(sys, chains, layout));
        MatrixXcd sys_block(1, 1);
        sys_block << 0.9;
        MatrixXcd C0 = initial_correlation_matrix(layout, false, sys_block);
        auto sampler = prop.block_sampler(C0, {layout.system(0)});

        std::vector<double> taus;
        for (int i = 0; i <= 60; ++i) taus.push_back(0.5 * i);
        RedfieldGenerator gen(sys, {bath});
        auto lam = redfield_propagate(gen, taus);

        MatrixXcd rho0 = MatrixXcd::Zero(2, 2);
        rho0(0, 0) = 0.1;
        rho0(1, 1) = 0.9;
        double worst = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const double p_exact = sampler.block(taus[i])(0, 0).real();
            MatrixXcd rho_re = unvec(Eigen::VectorXcd(lam[i].m * vec(rho0)), 2);
            worst = std::max(worst, std::abs(p_exact - rho_re(1, 1).real()));
        }
        REQUIRE(worst < 5e-3);
    }

    SECTION("double dot populations and interdot coherence") {
        SystemSpec sys;
        sys.n_modes = 2;
        sys.epsilon = Eigen::VectorXd::Zero(2);
        sys.hopping_g = 0.1;
        BathSpec bl = bath, br = bath;
        bl.mu = 0.05;
        br.mu = -0.05;
        auto make = [&](const BathSpec& b) {
            auto [fw, ew] = thermofield_split(b);
            return BathChains{chain_coefficients(fw, b.n_modes, 1500), chain_coefficients(ew, b.n_modes, 1500)};
        };
        std::vector<BathChains> chains{make(bl), make(br)};
        ModeLayout layout = ModeLayout::make(2, 2, bath.n_modes + 1);
        Propagator prop(assemble_hamiltonian(sys, chains, layout));

        MatrixXcd sys_block(2, 2);
        sys_block << 0.8, 0.3, 0.3, 0.4;  // eigenvalues within [0,1]
        MatrixXcd C0 = initial_correlation_matrix(layout, false, sys_block);
        auto sampler = prop.block_sampler(C0, {layout.system(0), layout.system(1)});

        std::vector<double> taus;
        for (int i = 0; i <= 40; ++i) taus.push_back(0.75 * i);
        RedfieldGenerator gen(sys, {bl, br});
        auto lam = redfield_propagate(gen, taus);

        FockSpace f(2);
        MatrixXcd rho0 = gaussian_rdm(sys_block);
        MatrixXcd n1 = f.number(0), n2 = f.number(1);
        MatrixXcd hop = f.creation(0) * f.annihilation(1);  // <s_1† s_2>
        double worst = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i) {
            MatrixXcd Cs = sampler.block(taus[i]);
            MatrixXcd rho_re = unvec(Eigen::VectorXcd(lam[i].m * vec(rho0)), 4);
            worst = std::max(worst, std::abs(Cs(0, 0).real() - (n1 * rho_re).trace().real()));
            worst = std::max(worst, std::abs(Cs(1, 1).real() - (n2 * rho_re).trace().real()));
            const cplx coh_exact = Cs(1, 0);  // <s_1† s_2> = C_{s2,s1}
            const cplx coh_re = (hop * rho_re).trace();
            worst = std::max(worst, std::abs(coh_exact - coh_re));
        }
        REQUIRE(worst < 5e-3);
    }
}

TEST_CASE("Perturbative fast state", "[redfield]") {
    SpectralDensity sd{0.01, 1.0};
    BathSpec bath{sd, 10.0, 0.1, 10};

    SECTION("zero coupling reduces to free rotation (identity on diagonal states)") {
        SpectralDensity sd0{0.0, 1.0};
        BathSpec b0{sd0, 10.0, 0.1, 10};
        MatrixXcd rho_ss = MatrixXcd::Zero(2, 2);
        rho_ss(0, 0) = 0.3;
        rho_ss(1, 1) = 0.7;
        MatrixXcd rf = perturbative_fast_state(single_dot(0.4), {b0}, 5.0, rho_ss);
        REQUIRE((rf - rho_ss).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("hermitian with unit trace") {
        MatrixXcd rho_ss = MatrixXcd::Zero(2, 2);
        rho_ss(0, 0) = 0.27;
        rho_ss(1, 1) = 0.73;
        MatrixXcd rf = perturbative_fast_state(single_dot(0.0), {bath}, 20.0, rho_ss);
        REQUIRE((rf - rf.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE(rf.trace().real() == Catch::Approx(1.0).margin(1e-12));
        // the correction pushes the population away from the steady value
        REQUIRE(std::abs(rf(1, 1).real() - 0.73) > 1e-4);
    }
}
