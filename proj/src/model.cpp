#include "magq/model.hpp"

#include <cmath>
#include <sstream>

namespace magq {

void MaterialParams::validate() const {
    if (!(exchange_J > 0.0)) throw ParamError("material: exchange J must be > 0");
    if (!(spin_S > 0.0)) throw ParamError("material: spin S must be > 0");
    if (n_sites < 1) throw ParamError("material: N_F must be >= 1");
    if (!(lattice_constant > 0.0)) throw ParamError("material: lattice constant must be > 0");
}

void ModelParams::validate() const {
    if (qubits.empty() || qubits.size() > 3) {
        throw ParamError("model: number of qubits must be 1..3");
    }
    for (const auto& q : qubits) {
        if (!(q.omega_q > 0.0)) throw ParamError("model: omega_q must be > 0");
        if (!std::isfinite(q.omega_q) || !std::isfinite(q.g_R) || !std::isfinite(q.g_CR)) {
            throw ParamError("model: qubit parameters must be finite");
        }
    }
    if (!std::isfinite(omega0)) throw ParamError("model: omega0 must be finite");
}

bool ModelParams::identical_qubits(double rel_tol) const {
    for (std::size_t i = 1; i < qubits.size(); ++i) {
        const auto& a = qubits[0];
        const auto& b = qubits[i];
        auto close = [rel_tol](double x, double y) {
            return std::abs(x - y) <= rel_tol * std::max({std::abs(x), std::abs(y), 1.0});
        };
        if (!close(a.omega_q, b.omega_q) || !close(a.g_R, b.g_R) || !close(a.g_CR, b.g_CR)) {
            return false;
        }
    }
    return true;
}

std::pair<double, double> anisotropy_to_AB(const MaterialParams& m) {
    m.validate();
    const double A = m.zeeman + (m.K_x + m.K_y - 2.0 * m.K_z) * m.spin_S;
    const double B = m.spin_S * (m.K_x - m.K_y) / 2.0;
    return {A, B};
}

std::pair<double, double> magnon_dispersion(const MaterialParams& m,
                                            const std::array<double, 3>& k) {
    auto [A0, B0] = anisotropy_to_AB(m);
    const double a = m.lattice_constant;
    const double cosines =
        std::cos(k[0] * a) + std::cos(k[1] * a) + std::cos(k[2] * a);
    return {A0 + 4.0 * m.exchange_J * m.spin_S * (3.0 - cosines), B0};
}

ModeSpacing check_single_mode(const MaterialParams& m, int L, double threshold) {
    if (L < 2) throw ParamError("check_single_mode: L must be >= 2");
    const std::array<double, 3> k1{M_PI / (L * m.lattice_constant), 0.0, 0.0};
    const double spacing = magnon_dispersion(m, k1).first - anisotropy_to_AB(m).first;
    return {spacing, spacing > threshold};
}

SqueezeParams bogoliubov(double A, double B) {
    if (!std::isfinite(A) || !std::isfinite(B)) {
        throw ParamError("bogoliubov: A, B must be finite");
    }
    const double disc = A * A - 4.0 * B * B;
    if (!(disc > 0.0)) {
        std::ostringstream msg;
        msg << "bogoliubov: stability violated: A^2 > 4B^2 fails (A=" << A << ", B=" << B
            << ")";
        throw StabilityError(msg.str());
    }
    SqueezeParams sq;
    sq.A = A;
    sq.B = B;
    sq.omega0 = std::sqrt(disc);
    const double denom2 = (A + sq.omega0) * (A + sq.omega0) - 4.0 * B * B;
    if (!(denom2 > 0.0)) {
        std::ostringstream msg;
        msg << "bogoliubov: stability violated: (A+omega0)^2 > 4B^2 fails (A=" << A
            << ", B=" << B << ")";
        throw StabilityError(msg.str());
    }
    sq.sinh_r = -2.0 * B / std::sqrt(denom2);
    sq.cosh_r = std::sqrt(1.0 + sq.sinh_r * sq.sinh_r);
    sq.r = std::asinh(sq.sinh_r);
    return sq;
}

CouplingParams bare_coupling(double j_int, long n_int, double psi2, double spin_S,
                             long n_sites_f) {
    if (j_int < 0.0) throw ParamError("bare_coupling: J_int must be >= 0");
    if (n_int < 1) throw ParamError("bare_coupling: N_int must be >= 1");
    if (!(psi2 > 0.0) || psi2 > 1.0) throw ParamError("bare_coupling: psi2 must be in (0,1]");
    if (!(spin_S > 0.0)) throw ParamError("bare_coupling: S must be > 0");
    if (n_sites_f < 1) throw ParamError("bare_coupling: N_F must be >= 1");
    CouplingParams c;
    c.j_int = j_int;
    c.n_int = n_int;
    c.psi2 = psi2;
    const double occupancy = j_int * static_cast<double>(n_int) * psi2;
    c.g = occupancy * std::sqrt(spin_S / (2.0 * static_cast<double>(n_sites_f)));
    c.delta_omega_q = -spin_S * occupancy;
    return c;
}

std::pair<double, double> dressed_couplings(double g, const SqueezeParams& sq) {
    return {g * sq.cosh_r, g * sq.sinh_r};
}

DenseOperator build_hamiltonian(const ModelParams& p) {
    p.validate();
    if (static_cast<int>(p.qubits.size()) != p.space.n_qubits) {
        throw ParamError("build_hamiltonian: space has " + std::to_string(p.space.n_qubits) +
                         " qubits but parameters list " + std::to_string(p.qubits.size()));
    }
    const DenseOperator a = boson_annihilation(p.space);
    const DenseOperator ad = a.adjoint();
    DenseOperator h = p.omega0 * boson_number(p.space);
    for (int n = 1; n <= p.space.n_qubits; ++n) {
        const auto& q = p.qubits[static_cast<std::size_t>(n - 1)];
        const DenseOperator sp = qubit_operator(p.space, n, QubitOp::plus);
        const DenseOperator sm = qubit_operator(p.space, n, QubitOp::minus);
        h += (q.omega_q / 2.0) * qubit_operator(p.space, n, QubitOp::sz);
        h += q.g_R * (ad * sm + a * sp);
        h += q.g_CR * (ad * sp + a * sm);
    }
    return h;
}

DenseOperator build_lab_frame_mode(const HilbertSpace& space, double A, double B) {
    bogoliubov(A, B); // stability gate only
    const DenseOperator a = boson_annihilation(space);
    const DenseOperator ad = a.adjoint();
    return A * (ad * a) + B * (a * a + ad * ad);
}

DenseOperator total_excitation_number(const HilbertSpace& space) {
    DenseOperator n_tot = boson_number(space);
    for (int q = 1; q <= space.n_qubits; ++q) {
        n_tot += qubit_operator(space, q, QubitOp::plus) *
                 qubit_operator(space, q, QubitOp::minus);
    }
    return n_tot;
}

} // namespace magq
