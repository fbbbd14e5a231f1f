#include <doctest.h>

#include <functional>
#include <random>

#include "magq/perturbation.hpp"

using namespace magq;

namespace {

// Bisect a sign change of f over the coupling ratio g_CR/g_R.
double bracket_root_ratio(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    REQUIRE(flo * f(hi) < 0.0);
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if (flo * fmid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("third order: general sum matches the identical closed form") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> uw(0.4, 1.6), ug(-0.2, 0.2), uo(0.2, 5.0);
    int tested = 0;
    while (tested < 100) {
        const double wq = uw(rng), gr = ug(rng), gcr = ug(rng), w0 = uo(rng);
        if (std::abs(w0 - wq) < 0.05 || std::abs(w0 + wq) < 0.05) continue;
        ++tested;
        const double general = geff3_general(PertInputs::identical(w0, wq, gr, gcr));
        const double closed = geff3_identical(w0, wq, gr, gcr);
        CHECK(std::abs(general - closed) <=
              1e-12 * std::max({std::abs(closed), std::abs(general), 1e-30}));
    }
}

TEST_CASE("third order cancels at omega0 = sum of the qubit splittings") {
    SUBCASE("identical qubits at omega0 = 3 omega_q") {
        const auto b = geff3_general_breakdown(PertInputs::identical(3.0, 1.0, 0.1, 0.1));
        CHECK(std::abs(b.value) <= 1e-14 * b.scale);
        CHECK(std::abs(geff3_identical(3.0, 1.0, 0.1, 0.1)) == 0.0);
    }
    SUBCASE("distinct splittings summing to the mode energy") {
        PertInputs in;
        in.omega_q = {0.9, 1.0, 1.1};
        in.g_R = {0.1, 0.1, 0.1};
        in.g_CR = {0.1, 0.1, 0.1};
        in.omega0 = 3.0;
        const auto b = geff3_general_breakdown(in);
        CHECK(std::abs(b.value) <= 1e-14 * b.scale);
    }
    SUBCASE("random non-identical triples") {
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> uw(0.5, 1.5), ug(-0.2, 0.2);
        for (int t = 0; t < 100; ++t) {
            PertInputs in;
            in.omega_q = {uw(rng), uw(rng), uw(rng)};
            in.g_R = {ug(rng), ug(rng), ug(rng)};
            in.g_CR = {ug(rng), ug(rng), ug(rng)};
            in.omega0 = in.omega_q[0] + in.omega_q[1] + in.omega_q[2];
            const auto b = geff3_general_breakdown(in);
            CHECK(std::abs(b.value) <= 1e-14 * b.scale);
        }
    }
}

TEST_CASE("third order away from resonance") {
    // |g3| at omega0 = 2 omega_q: 3 g_R^2 g_CR / (omega_q (serving factors)) -> 1e-3.
    // The sign is convention-dependent; the magnitude is not.
    CHECK(std::abs(std::abs(geff3_identical(2.0, 1.0, 0.1, 0.1)) - 0.001) < 1e-17);
    CHECK(std::abs(std::abs(geff3_general(PertInputs::identical(2.0, 1.0, 0.1, 0.1))) -
                   0.001) < 1e-15);
    SUBCASE("odd in g_CR") {
        const double plus = geff3_identical(2.2, 1.0, 0.13, 0.07);
        const double minus = geff3_identical(2.2, 1.0, 0.13, -0.07);
        CHECK(plus == -minus);
    }
    SUBCASE("singular at omega0 = omega_q") {
        CHECK_THROWS_AS(geff3_identical(1.0, 1.0, 0.1, 0.1), SingularityError);
        CHECK_THROWS_AS(geff3_general(PertInputs::identical(1.0, 1.0, 0.1, 0.1)),
                        SingularityError);
    }
}

TEST_CASE("fifth-order closed-form anchors") {
    CHECK(std::abs(geff5_identical_resonance(0.1, 0.1, 1.0) - 1.40625e-5) <=
          1e-15 * 1.40625e-5);
    CHECK(std::abs(geff3_shifted(0.1, 0.1, 1.0) - (-0.5625e-5)) <= 1e-15 * 0.5625e-5);
    CHECK(std::abs(geff_total_resonance(0.1, 0.1, 1.0) - 0.84375e-5) <= 2e-15 * 0.84375e-5);
    CHECK(std::abs(crossing_shift(0.1, 0.1, 1.0) - 2.985) <= 1e-15 * 2.985);

    SUBCASE("crossing shift limits") {
        CHECK(crossing_shift(0.0, 0.0, 1.0) == 3.0);
        // equal couplings always pull the crossing down by 3 g^2 / (2 w_q)
        for (double g : {0.05, 0.1, 0.15}) {
            CHECK(std::abs(crossing_shift(g, g, 1.0) - (3.0 - 1.5 * g * g)) < 1e-15);
        }
    }

    SUBCASE("odd under g_CR sign flip") {
        CHECK(geff5_identical_resonance(0.12, 0.07, 1.0) ==
              -geff5_identical_resonance(0.12, -0.07, 1.0));
        CHECK(geff3_shifted(0.12, 0.07, 1.0) == -geff3_shifted(0.12, -0.07, 1.0));
        CHECK(geff_total_resonance(0.12, 0.07, 1.0) ==
              -geff_total_resonance(0.12, -0.07, 1.0));
    }

    SUBCASE("coupling-power scaling") {
        for (double lam : {0.5, 2.0}) {
            const double third = geff3_identical(2.0, 1.0, lam * 0.1, lam * 0.1);
            CHECK(std::abs(third - std::pow(lam, 3) * geff3_identical(2.0, 1.0, 0.1, 0.1)) <
                  1e-15);
            const double fifth = geff_total_resonance(lam * 0.1, lam * 0.1, 1.0);
            CHECK(std::abs(fifth -
                           std::pow(lam, 5) * geff_total_resonance(0.1, 0.1, 1.0)) < 1e-18);
        }
    }
}

TEST_CASE("zero-tuning roots of the effective coupling") {
    const double gr = 0.1;
    SUBCASE("shifted third order vanishes at g_CR = sqrt(2) g_R") {
        const double root = bracket_root_ratio(
            [&](double ratio) { return geff3_shifted(gr, ratio * gr, 1.0); }, 1.0, 2.0);
        CHECK(std::abs(root - std::sqrt(2.0)) < 1e-9);
    }
    SUBCASE("fifth order vanishes at g_CR = sqrt(8/3) g_R") {
        const double root = bracket_root_ratio(
            [&](double ratio) { return geff5_identical_resonance(gr, ratio * gr, 1.0); },
            1.0, 2.0);
        CHECK(std::abs(root - std::sqrt(8.0 / 3.0)) < 1e-9);
    }
    SUBCASE("total vanishes at g_CR = 2 g_R") {
        const double root = bracket_root_ratio(
            [&](double ratio) { return geff_total_resonance(gr, ratio * gr, 1.0); }, 1.5,
            2.5);
        CHECK(std::abs(root - 2.0) < 1e-9);
        CHECK(std::abs(geff_total_resonance(gr, 2.0 * gr, 1.0)) < 1e-18);
    }
}

TEST_CASE("fifth-order diagram families") {
    SUBCASE("frozen per-family values at g_R = g_CR = 0.1") {
        const auto fam = geff5_diagrams(PertInputs::identical(3.0, 1.0, 0.1, 0.1));
        CHECK(std::abs(fam.f5ac - (-1.6875e-5)) < 1e-19);
        CHECK(std::abs(fam.f5bd - 1.6875e-5) < 1e-19);
        CHECK(std::abs(fam.f5e - 0.28125e-5) < 1e-19);
        CHECK(std::abs(fam.f5f - 0.5625e-5) < 1e-19);
        CHECK(std::abs(fam.f5g - 0.5625e-5) < 1e-19);
    }

    SUBCASE("family total reproduces the closed form at resonance") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> uw(0.4, 1.6), ug(-0.2, 0.2);
        for (int t = 0; t < 100; ++t) {
            const double wq = uw(rng), gr = ug(rng), gcr = ug(rng);
            const auto fam = geff5_diagrams(PertInputs::identical(3.0 * wq, wq, gr, gcr));
            const double closed = geff5_identical_resonance(gr, gcr, wq);
            CHECK(std::abs(fam.total() - closed) <=
                  1e-11 * std::max(std::abs(closed), 1e-30));
        }
    }

    SUBCASE("equal couplings: total = 45 g^5 / (32 w_q^4)") {
        const double g = 0.08;
        const auto fam = geff5_diagrams(PertInputs::identical(3.0, 1.0, g, g));
        CHECK(std::abs(fam.total() - 45.0 * std::pow(g, 5) / 32.0) < 1e-18);
    }

    SUBCASE("every family carries a counter-rotating vertex") {
        const auto fam = geff5_diagrams(PertInputs::identical(3.0, 1.0, 0.1, 0.0));
        CHECK(fam.f5ac == 0.0);
        CHECK(fam.f5bd == 0.0);
        CHECK(fam.f5e == 0.0);
        CHECK(fam.f5f == 0.0);
        CHECK(fam.f5g == 0.0);
    }

    SUBCASE("non-identical or detuned evaluation is gated") {
        PertInputs in = PertInputs::identical(2.9, 1.0, 0.1, 0.1);
        CHECK_THROWS_AS(geff5_diagrams(in), ParamError);
        CHECK_NOTHROW(geff5_diagrams(in, true));
        PertInputs mixed = PertInputs::identical(3.0, 1.0, 0.1, 0.1);
        mixed.omega_q = {0.9, 1.0, 1.1};
        CHECK_THROWS_AS(geff5_diagrams(mixed), ParamError);
    }
}

TEST_CASE("shifted third order is the closed form evaluated at the crossing") {
    // Deviation is (9/8)(g/w_q)^2 to leading order, shrinking with g.
    double previous = 1.0;
    for (double g : {0.05, 0.02, 0.01}) {
        const double at_crossing = geff3_identical(crossing_shift(g, g, 1.0), 1.0, g, g);
        const double closed = geff3_shifted(g, g, 1.0);
        const double rel = std::abs(at_crossing - closed) / std::abs(closed);
        CHECK(rel < 1.3 * g * g);
        CHECK(rel < previous);
        previous = rel;
    }
}

TEST_CASE("aggregate breakdown") {
    SUBCASE("identical inputs") {
        const auto res = evaluate_effective_coupling(PertInputs::identical(3.0, 1.0, 0.1, 0.1));
        CHECK(std::abs(res.value - 0.84375e-5) <= 2e-15 * 0.84375e-5);
        CHECK(std::abs(res.g3) <= 1e-16);
        CHECK(std::abs(res.omega0_crossing - 2.985) < 1e-14);
        CHECK(std::abs(res.g5.total() - 1.40625e-5) < 1e-16);
        CHECK(std::abs(res.g3_shifted - (-0.5625e-5)) < 1e-19);
    }
    SUBCASE("non-identical inputs require the experimental flag") {
        PertInputs in = PertInputs::identical(3.0, 1.0, 0.1, 0.1);
        in.omega_q = {0.9, 1.0, 1.1};
        CHECK_THROWS_AS(evaluate_effective_coupling(in), ParamError);
        const auto res = evaluate_effective_coupling(in, true);
        CHECK(std::isnan(res.value));
        CHECK(std::isfinite(res.g3));
    }
    SUBCASE("invalid inputs") {
        PertInputs in = PertInputs::identical(3.0, -1.0, 0.1, 0.1);
        CHECK_THROWS_AS(evaluate_effective_coupling(in), ParamError);
    }
}
