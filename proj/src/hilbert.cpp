#include "magq/hilbert.hpp"

#include <cmath>

namespace magq {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

HilbertSpace build_space(int n_max, int n_qubits) {
    if (n_max < 2) {
        throw ParamError("build_space: n_max must be >= 2, got " + std::to_string(n_max));
    }
    if (n_qubits < 1 || n_qubits > 3) {
        throw ParamError("build_space: n_qubits must be in {1,2,3}, got " +
                         std::to_string(n_qubits));
    }
    return HilbertSpace{n_max, n_qubits};
}

DenseOperator boson_annihilation(const HilbertSpace& space) {
    const int d = space.dim();
    const int nq = 1 << space.n_qubits;
    DenseOperator a = DenseOperator::Zero(d, d);
    for (int n = 1; n < space.n_max; ++n) {
        const double amp = std::sqrt(static_cast<double>(n));
        for (int b = 0; b < nq; ++b) {
            a(space.index_of(n - 1, static_cast<unsigned>(b)),
              space.index_of(n, static_cast<unsigned>(b))) = amp;
        }
    }
    return a;
}

DenseOperator boson_number(const HilbertSpace& space) {
    const int d = space.dim();
    DenseOperator n_op = DenseOperator::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        n_op(i, i) = static_cast<double>(space.fock_of(i));
    }
    return n_op;
}

DenseOperator qubit_operator(const HilbertSpace& space, int qubit_index, QubitOp kind) {
    if (qubit_index < 1 || qubit_index > space.n_qubits) {
        throw ParamError("qubit_operator: qubit_index " + std::to_string(qubit_index) +
                         " out of range 1.." + std::to_string(space.n_qubits));
    }
    const int d = space.dim();
    const int shift = space.n_qubits - qubit_index; // bit position of this qubit
    const int mask = 1 << shift;
    DenseOperator op = DenseOperator::Zero(d, d);
    for (int col = 0; col < d; ++col) {
        const int bit = (col >> shift) & 1;
        switch (kind) {
        case QubitOp::sz:
            op(col, col) = bit ? 1.0 : -1.0;
            break;
        case QubitOp::plus: // |e><g|
            if (bit == 0) op(col | mask, col) = 1.0;
            break;
        case QubitOp::minus: // |g><e|
            if (bit == 1) op(col & ~mask, col) = 1.0;
            break;
        case QubitOp::sx:
            op(col ^ mask, col) = 1.0;
            break;
        case QubitOp::sy:
            // sigma_y = -i|e><g| + i|g><e|
            op(col ^ mask, col) = bit ? kI : -kI;
            break;
        }
    }
    return op;
}

DenseOperator identity_operator(const HilbertSpace& space) {
    return DenseOperator::Identity(space.dim(), space.dim());
}

DenseOperator all_excited_projector(const HilbertSpace& space) {
    const int d = space.dim();
    const unsigned all = (1u << space.n_qubits) - 1u;
    DenseOperator p = DenseOperator::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (space.bits_of(i) == all) p(i, i) = 1.0;
    }
    return p;
}

StateVector basis_state(const HilbertSpace& space, int fock, const std::string& qubit_letters) {
    if (fock < 0 || fock >= space.n_max) {
        throw ParamError("basis_state: fock level " + std::to_string(fock) +
                         " outside 0.." + std::to_string(space.n_max - 1));
    }
    if (static_cast<int>(qubit_letters.size()) != space.n_qubits) {
        throw ParamError("basis_state: expected " + std::to_string(space.n_qubits) +
                         " qubit letters, got '" + qubit_letters + "'");
    }
    unsigned bits = 0;
    for (char c : qubit_letters) {
        bits <<= 1;
        if (c == 'e') {
            bits |= 1u;
        } else if (c != 'g') {
            throw ParamError("basis_state: qubit letters must be 'g' or 'e', got '" +
                             qubit_letters + "'");
        }
    }
    StateVector v = StateVector::Zero(space.dim());
    v(space.index_of(fock, bits)) = 1.0;
    return v;
}

StateVector parse_state_label(const HilbertSpace& space, const std::string& label) {
    const auto comma = label.find(',');
    if (comma == std::string::npos) {
        throw ParamError("state label must look like '1,ggg', got '" + label + "'");
    }
    int fock = 0;
    try {
        std::size_t used = 0;
        fock = std::stoi(label.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument(label);
    } catch (const std::exception&) {
        throw ParamError("state label has a non-integer fock level: '" + label + "'");
    }
    return basis_state(space, fock, label.substr(comma + 1));
}

bool is_hermitian(const DenseOperator& op, double tol) {
    return (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

} // namespace magq
