#include <doctest.h>

#include "magq/dynamics.hpp"
#include "magq/perturbation.hpp"
#include "magq/spectrum.hpp"

using namespace magq;

namespace {

ModelParams three_qubit_model(double omega0, double g_R, double g_CR, int n_max = 10) {
    ModelParams p;
    p.omega0 = omega0;
    p.qubits = {{1.0, g_R, g_CR}, {1.0, g_R, g_CR}, {1.0, g_R, g_CR}};
    p.space = build_space(n_max, 3);
    return p;
}

ModelParams resonant_model(double g, GeffExtraction* extraction = nullptr) {
    ModelParams p = three_qubit_model(3.0, g, g);
    GapOptions opts;
    opts.check_convergence = false;
    const GeffExtraction ex = extract_geff(p, opts);
    p.omega0 = ex.omega0_star;
    if (extraction) *extraction = ex;
    return p;
}

} // namespace

TEST_CASE("stationary state under zero coupling") {
    ModelParams p = three_qubit_model(2.4, 0.0, 0.0, 4);
    EvolveOptions opts;
    opts.check_convergence = false;
    const std::vector<double> times{0.0, 1.0, 5.0, 20.0, 100.0};
    const DynamicsTrace tr = evolve(p, "1,ggg", times, opts);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(tr.magnon_number[i] - 1.0) < 1e-12);
        CHECK(std::abs(tr.three_qubit_correlator[i]) < 1e-12);
        for (const auto& q : tr.qubit_excitation) CHECK(std::abs(q[i]) < 1e-12);
        CHECK(std::abs(tr.target_fidelity[i] - 0.5) < 1e-12);
    }
    CHECK_THROWS_AS(rabi_period(tr), InsufficientSpanError);
}

TEST_CASE("evolve input validation") {
    ModelParams p = three_qubit_model(1.0, 0.1, 0.1, 4);
    EvolveOptions opts;
    opts.check_convergence = false;
    CHECK_THROWS_AS(evolve(p, "1,ggg", {}, opts), ParamError);
    CHECK_THROWS_AS(evolve(p, "1,ggg", {0.0, -1.0}, opts), ParamError);
    CHECK_THROWS_AS(evolve(p, "1,ggg", {0.0, 1.0, 1.0}, opts), ParamError);
    StateVector bad = StateVector::Zero(7);
    CHECK_THROWS_AS(evolve(p, bad, {0.0, 1.0}, opts), ParamError);
    StateVector unnormalized = StateVector::Zero(p.space.dim());
    unnormalized(0) = 0.5;
    CHECK_THROWS_AS(evolve(p, unnormalized, {0.0, 1.0}, opts), ParamError);
}

TEST_CASE("period extraction on a synthetic two-level trace") {
    // oracle: p_eee(t) = sin^2(g t) has period pi / g
    const double g = 1.7e-5;
    DynamicsTrace synth;
    const int n = 600;
    for (int i = 0; i < n; ++i) {
        const double t = 1.8 * (M_PI / g) * i / (n - 1);
        synth.times.push_back(t);
        const double s = std::sin(g * t);
        synth.three_qubit_correlator.push_back(s * s);
    }
    const double period = rabi_period(synth);
    CHECK(std::abs(period - M_PI / g) / (M_PI / g) < 1e-3);
}

TEST_CASE("three-excitation Rabi oscillation at resonance") {
    GeffExtraction ex;
    ModelParams p = resonant_model(0.1, &ex);
    EvolveOptions opts;
    opts.check_convergence = false;
    const int n_times = 1501;
    const double span = 1.75 * M_PI / ex.geff;
    std::vector<double> times(n_times);
    for (int i = 0; i < n_times; ++i) times[static_cast<std::size_t>(i)] = span * i / (n_times - 1);
    const DynamicsTrace tr = evolve(p, "1,ggg", times, opts);

    SUBCASE("population transfer and the two-level period") {
        const double max_peee =
            *std::max_element(tr.three_qubit_correlator.begin(),
                              tr.three_qubit_correlator.end());
        CHECK(max_peee > 0.9);
        const double period = rabi_period(tr);
        CHECK(std::abs(period - M_PI / ex.geff) / (M_PI / ex.geff) < 0.1);
    }

    SUBCASE("single-qubit excitation rides the joint oscillation") {
        double worst = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            worst = std::max(worst, std::abs(tr.qubit_excitation[0][i] -
                                             tr.three_qubit_correlator[i]));
        }
        CHECK(worst < 0.05);
    }

    SUBCASE("unitarity and energy conservation") {
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            CHECK(std::abs(tr.norm[i] - 1.0) < 1e-10);
            CHECK(std::abs(tr.energy[i] - tr.energy[0]) < 1e-10);
        }
    }

    SUBCASE("permutation symmetry of the qubit traces") {
        double worst = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            for (int q = 1; q < 3; ++q) {
                worst = std::max(worst,
                                 std::abs(tr.qubit_excitation[0][i] -
                                          tr.qubit_excitation[static_cast<std::size_t>(q)][i]));
            }
        }
        CHECK(worst < 1e-10);
    }

    SUBCASE("two-level manifold dominates") {
        // population stays almost entirely in |1,ggg> + |0,eee|
        const StateVector a = basis_state(p.space, 1, "ggg");
        const StateVector b = basis_state(p.space, 0, "eee");
        for (double t : {0.1 * span, 0.37 * span, 0.8 * span}) {
            const StateVector psi = evolve_state(p, a, t);
            const double pop = std::norm(a.dot(psi)) + std::norm(b.dot(psi));
            CHECK(pop > 0.95);
        }
    }
}

TEST_CASE("time reversal returns the initial state") {
    ModelParams p = three_qubit_model(2.985, 0.1, 0.1, 8);
    const StateVector psi0 = basis_state(p.space, 1, "ggg");
    const double t = 3000.0;
    const StateVector forward = evolve_state(p, psi0, t);
    const StateVector back = evolve_state(p, forward, -t);
    CHECK((back - psi0).norm() < 1e-9);
}

TEST_CASE("ghz superposition peak") {
    SUBCASE("full model at resonance") {
        GeffExtraction ex;
        ModelParams p = resonant_model(0.1, &ex);
        EvolveOptions opts;
        opts.check_convergence = false;
        const GhzPeak peak = ghz_fidelity_peak(p, opts);
        CHECK(peak.fidelity > 0.98);
        const double t_expected = M_PI / (4.0 * ex.geff);
        CHECK(std::abs(peak.t_star - t_expected) / t_expected < 0.1);
    }

    SUBCASE("rotating-only coupling cannot transfer") {
        ModelParams p = three_qubit_model(2.985, 0.1, 0.0);
        EvolveOptions opts;
        opts.check_convergence = false;
        const GhzPeak peak = ghz_fidelity_peak(p, opts);
        CHECK(peak.fidelity > 0.4);
        CHECK(peak.fidelity < 0.55);
    }
}

TEST_CASE("cutoff-doubling convergence guard") {
    // deep-strong couplings on a two-level Fock space cannot be converged
    ModelParams p = three_qubit_model(1.0, 0.8, 0.8, 2);
    EvolveOptions opts; // check on by default
    const std::vector<double> times{0.0, 2.0, 5.0};
    CHECK_THROWS_AS(evolve(p, "1,ggg", times, opts), ConvergenceError);
}

TEST_CASE("default time grid spans the requested number of periods") {
    ModelParams p = three_qubit_model(2.985, 0.1, 0.1);
    const auto times = default_time_grid(p, 256, 1.2);
    REQUIRE(times.size() == 256);
    const double geff = geff_total_resonance(0.1, 0.1, 1.0);
    CHECK(std::abs(times.back() - 1.2 * M_PI / geff) < 1e-6 * times.back());
    CHECK(times.front() == 0.0);
}
