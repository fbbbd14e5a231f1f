#include "magq/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace magq {

namespace {

// The six orderings of three distinct qubit indices.
constexpr std::array<std::array<int, 3>, 6> kPerms{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

double checked_denominator(double d, const char* factor, double scale) {
    if (std::abs(d) <= 1e-12 * std::max(scale, 1.0)) {
        std::ostringstream msg;
        msg << "vanishing energy denominator " << factor << " = " << d;
        throw SingularityError(msg.str());
    }
    return d;
}

void validate_inputs(const PertInputs& in) {
    for (double w : in.omega_q) {
        if (!(w > 0.0)) throw ParamError("perturbation: all omega_q must be > 0");
    }
    if (!std::isfinite(in.omega0)) throw ParamError("perturbation: omega0 must be finite");
}

double energy_scale(const PertInputs& in) {
    return std::max({std::abs(in.omega0), in.omega_q[0], in.omega_q[1], in.omega_q[2]});
}

} // namespace

PertInputs PertInputs::identical(double omega0, double omega_q, double g_R, double g_CR) {
    PertInputs in;
    in.omega0 = omega0;
    in.omega_q = {omega_q, omega_q, omega_q};
    in.g_R = {g_R, g_R, g_R};
    in.g_CR = {g_CR, g_CR, g_CR};
    return in;
}

bool PertInputs::is_identical(double rel_tol) const {
    auto close = [rel_tol](double x, double y) {
        return std::abs(x - y) <= rel_tol * std::max({std::abs(x), std::abs(y), 1.0});
    };
    for (int i = 1; i < 3; ++i) {
        if (!close(omega_q[0], omega_q[static_cast<std::size_t>(i)]) ||
            !close(g_R[0], g_R[static_cast<std::size_t>(i)]) ||
            !close(g_CR[0], g_CR[static_cast<std::size_t>(i)])) {
            return false;
        }
    }
    return true;
}

bool PertInputs::at_resonance(double rel_tol) const {
    const double sum = omega_q[0] + omega_q[1] + omega_q[2];
    return std::abs(omega0 - sum) <= rel_tol * std::max(std::abs(sum), 1.0);
}

Geff3Breakdown geff3_general_breakdown(const PertInputs& in) {
    validate_inputs(in);
    const double w0 = in.omega0;
    const double scale = energy_scale(in);
    Geff3Breakdown out;
    out.terms.reserve(12);
    for (const auto& p : kPerms) {
        const auto si = static_cast<std::size_t>(p[0]);
        const auto sj = static_cast<std::size_t>(p[1]);
        const auto sk = static_cast<std::size_t>(p[2]);
        const double wi = in.omega_q[si];
        const double wj = in.omega_q[sj];
        const double d_shared = checked_denominator(-wi - wj, "(-omega_qi - omega_qj)", scale);
        const double d_cr = checked_denominator(-w0 - wi, "(-omega0 - omega_qi)", scale);
        const double d_r = checked_denominator(w0 - wi, "(omega0 - omega_qi)", scale);
        // counter-rotating vertex first: the extra magnon gives the Bose factor 2
        const double t1 = 2.0 * in.g_CR[si] * in.g_R[sj] * in.g_R[sk] / (d_cr * d_shared);
        // counter-rotating vertex in the middle
        const double t2 = in.g_R[si] * in.g_CR[sj] * in.g_R[sk] / (d_r * d_shared);
        out.terms.push_back(t1);
        out.terms.push_back(t2);
        out.value += t1 + t2;
        out.scale = std::max({out.scale, std::abs(t1), std::abs(t2)});
    }
    return out;
}

double geff3_general(const PertInputs& in) {
    return geff3_general_breakdown(in).value;
}

double geff3_identical(double omega0, double omega_q, double g_R, double g_CR) {
    if (!(omega_q > 0.0)) throw ParamError("geff3_identical: omega_q must be > 0");
    const double scale = std::max(std::abs(omega0), omega_q);
    checked_denominator(omega0 - omega_q, "(omega0 - omega_q)", scale);
    checked_denominator(omega0 + omega_q, "(omega0 + omega_q)", scale);
    return 3.0 * g_R * g_R * g_CR * (omega0 - 3.0 * omega_q) /
           (omega_q * (omega0 * omega0 - omega_q * omega_q));
}

double geff5_identical_resonance(double g_R, double g_CR, double omega_q) {
    if (!(omega_q > 0.0)) throw ParamError("geff5_identical_resonance: omega_q must be > 0");
    const double wq4 = omega_q * omega_q * omega_q * omega_q;
    return -9.0 * (3.0 * g_CR * g_CR * g_CR * g_R * g_R - 8.0 * g_CR * g_R * g_R * g_R * g_R) /
           (32.0 * wq4);
}

Geff5Families geff5_diagrams(const PertInputs& in, bool experimental) {
    validate_inputs(in);
    if (!experimental && !(in.is_identical() && in.at_resonance())) {
        throw ParamError(
            "geff5_diagrams: validated only for identical qubits at omega0 = 3 omega_q; "
            "pass experimental = true to evaluate the raw sums anyway");
    }
    const double w0 = in.omega0;
    const double scale = energy_scale(in);
    const double wq_sum = in.omega_q[0] + in.omega_q[1] + in.omega_q[2];
    Geff5Families out;

    // Loop-insertion families: a counter-rotating (5a+5c) or rotating (5b+5d)
    // round trip on qubit i attached to the initial vertex, times the
    // third-order path with the loop denominator squared. These are
    // renormalization terms and enter with a minus sign.
    for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const double wi = in.omega_q[si];
        const double d_cr = checked_denominator(-w0 - wi, "(-omega0 - omega_qi)", scale);
        const double d_r = checked_denominator(w0 - wi, "(omega0 - omega_qi)", scale);
        const double loop_cr = 2.0 * in.g_CR[si] * in.g_CR[si] / d_cr;
        const double loop_r = in.g_R[si] * in.g_R[si] / d_r;
        for (const auto& p : kPerms) {
            const auto sj = static_cast<std::size_t>(p[0]);
            const auto sk = static_cast<std::size_t>(p[1]);
            const auto sl = static_cast<std::size_t>(p[2]);
            const double wj = in.omega_q[sj];
            const double d_shared =
                checked_denominator(-wi - wj, "(-omega_qi - omega_qj)", scale);
            const double path =
                2.0 * in.g_CR[sj] * in.g_R[sk] * in.g_R[sl] / (d_cr * d_cr * d_shared) +
                in.g_R[sj] * in.g_CR[sk] * in.g_R[sl] / (d_r * d_r * d_shared);
            out.f5ac -= loop_cr * path;
            out.f5bd -= loop_r * path;
        }
    }

    // Families with two counter-rotating excitations up front (virtual states
    // with up to 3 mode quanta), closed by rotating vertices.
    for (const auto& p : kPerms) {
        const auto si = static_cast<std::size_t>(p[0]);
        const auto sj = static_cast<std::size_t>(p[1]);
        const auto sk = static_cast<std::size_t>(p[2]);
        const double wi = in.omega_q[si];
        const double wj = in.omega_q[sj];
        const double wk = in.omega_q[sk];
        const double d1 = checked_denominator(-w0 - wi, "(-omega0 - omega_qi)", scale);
        const double d2 = checked_denominator(-2.0 * w0 - wi - wj,
                                              "(-2 omega0 - omega_qi - omega_qj)", scale);

        // 5e: l free
        const double d3e =
            checked_denominator(-w0 - wq_sum, "(-omega0 - sum omega_q)", scale);
        for (int l = 0; l < 3; ++l) {
            const auto slf = static_cast<std::size_t>(l);
            const double d4 = checked_denominator(in.omega_q[slf] - wq_sum,
                                                  "(omega_ql - sum omega_q)", scale);
            out.f5e += 6.0 * in.g_CR[si] * in.g_CR[sj] * in.g_R[sk] * in.g_CR[slf] *
                       in.g_R[slf] / (d1 * d2 * d3e * d4);
        }

        // 5f: l in {i,j}; m in {l,k}; n the other of {l,k}
        for (const auto sl : {si, sj}) {
            const double wl = in.omega_q[sl];
            const double d3 = checked_denominator(
                -w0 + wl + wk - wq_sum, "(-omega0 + omega_ql + omega_qk - sum omega_q)",
                scale);
            const std::array<std::size_t, 2> mn{sl, sk};
            for (int pick = 0; pick < 2; ++pick) {
                const auto sm = mn[static_cast<std::size_t>(pick)];
                const auto sn = mn[static_cast<std::size_t>(1 - pick)];
                const double d4 = checked_denominator(in.omega_q[sn] - wq_sum,
                                                      "(omega_qn - sum omega_q)", scale);
                out.f5f += 6.0 * in.g_CR[si] * in.g_CR[sj] * in.g_CR[sl] * in.g_R[sm] *
                           in.g_R[sn] / (d1 * d2 * d3 * d4);
            }
        }
    }

    // 5g: counter-rotating round trip through a 2-quanta virtual state on
    // qubit i, then the rotating three-step ladder on j,k,l.
    const double d_2w0 = checked_denominator(-2.0 * w0, "(-2 omega0)", scale);
    for (int i = 0; i < 3; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const double d1 =
            checked_denominator(-w0 - in.omega_q[si], "(-omega0 - omega_qi)", scale);
        for (const auto& p : kPerms) {
            const auto sj = static_cast<std::size_t>(p[0]);
            const auto sk = static_cast<std::size_t>(p[1]);
            const auto sl = static_cast<std::size_t>(p[2]);
            const double d3 =
                checked_denominator(-w0 - in.omega_q[sj], "(-omega0 - omega_qj)", scale);
            const double d4 = checked_denominator(-in.omega_q[sj] - in.omega_q[sk],
                                                  "(-omega_qj - omega_qk)", scale);
            out.f5g += 6.0 * in.g_CR[si] * in.g_R[si] * in.g_R[sj] * in.g_R[sk] *
                       in.g_R[sl] / (d1 * d_2w0 * d3 * d4);
        }
    }
    return out;
}

double crossing_shift(double g_R, double g_CR, double omega_q) {
    if (!(omega_q > 0.0)) throw ParamError("crossing_shift: omega_q must be > 0");
    return 3.0 * omega_q + 3.0 * g_CR * g_CR / (2.0 * omega_q) - 3.0 * g_R * g_R / omega_q;
}

double geff3_shifted(double g_R, double g_CR, double omega_q) {
    if (!(omega_q > 0.0)) throw ParamError("geff3_shifted: omega_q must be > 0");
    const double wq4 = omega_q * omega_q * omega_q * omega_q;
    return 9.0 * (g_CR * g_CR * g_CR * g_R * g_R - 2.0 * g_CR * g_R * g_R * g_R * g_R) /
           (16.0 * wq4);
}

double geff_total_resonance(double g_R, double g_CR, double omega_q) {
    return geff5_identical_resonance(g_R, g_CR, omega_q) + geff3_shifted(g_R, g_CR, omega_q);
}

PertResult evaluate_effective_coupling(const PertInputs& in, bool experimental) {
    validate_inputs(in);
    PertResult res;
    res.g3 = geff3_general(in);
    if (in.is_identical()) {
        const double wq = in.omega_q[0];
        const double gr = in.g_R[0];
        const double gcr = in.g_CR[0];
        res.g5 = geff5_diagrams(
            PertInputs::identical(3.0 * wq, wq, gr, gcr));
        res.g3_shifted = geff3_shifted(gr, gcr, wq);
        res.omega0_crossing = crossing_shift(gr, gcr, wq);
        res.value = geff_total_resonance(gr, gcr, wq);
    } else {
        if (!experimental) {
            throw ParamError(
                "effective coupling breakdown for non-identical qubits is experimental; "
                "enable the experimental flag to evaluate the raw sums");
        }
        res.g5 = geff5_diagrams(in, true);
        res.g3_shifted = std::numeric_limits<double>::quiet_NaN();
        res.omega0_crossing = std::numeric_limits<double>::quiet_NaN();
        res.value = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

} // namespace magq
