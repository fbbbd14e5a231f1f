#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "magq/errors.hpp"

namespace magq {

using DenseOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Truncated composite space: one bosonic mode (occupations 0..n_max-1)
// times 1..3 two-level qubits.
//
// Basis ordering (fixed, relied upon by file output and state labels):
//   index = fock_level * 2^n_qubits + qubit_bits
// where qubit 1 occupies the most significant bit and bit value 1 means
// the excited state |e>.
struct HilbertSpace {
    int n_max = 0;
    int n_qubits = 0;

    int dim() const { return n_max << n_qubits; }

    int index_of(int fock, unsigned qubit_bits) const {
        return (fock << n_qubits) + static_cast<int>(qubit_bits);
    }
    int fock_of(int index) const { return index >> n_qubits; }
    unsigned bits_of(int index) const {
        return static_cast<unsigned>(index) & ((1u << n_qubits) - 1u);
    }
    // Bit of qubit `q` (1-based, qubit 1 = MSB) within a basis index.
    int qubit_bit(int index, int q) const {
        return (index >> (n_qubits - q)) & 1;
    }
};

HilbertSpace build_space(int n_max, int n_qubits);

// Ladder operator a with a|n> = sqrt(n)|n-1> on the retained Fock levels,
// identity on the qubit factors.
DenseOperator boson_annihilation(const HilbertSpace& space);
DenseOperator boson_number(const HilbertSpace& space);

enum class QubitOp { sx, sy, sz, plus, minus };

// Pauli / ladder operator of qubit `qubit_index` (1-based) embedded in the
// full space. sz has +1 on |e>, -1 on |g>.
DenseOperator qubit_operator(const HilbertSpace& space, int qubit_index, QubitOp kind);

DenseOperator identity_operator(const HilbertSpace& space);

// Projector onto all qubits excited (sigma+^1..sigma-^1 product), boson identity.
DenseOperator all_excited_projector(const HilbertSpace& space);

// Unit basis vector |fock, bits>; `qubit_letters` is e.g. "ggg" / "egg"
// ordered qubit 1 first.
StateVector basis_state(const HilbertSpace& space, int fock, const std::string& qubit_letters);

// Parse a label of the form "1,ggg" into a basis vector.
StateVector parse_state_label(const HilbertSpace& space, const std::string& label);

bool is_hermitian(const DenseOperator& op, double tol = 1e-12);

} // namespace magq
