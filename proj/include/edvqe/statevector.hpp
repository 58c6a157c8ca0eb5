#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "edvqe/graph.hpp"

namespace edvqe {

class Rng;

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 20;

/// Dense state of one subsystem. Qubit q is bit q of the amplitude index
/// (qubit 0 is least significant).
class Statevector {
public:
    /// |0...0> on n_qubits qubits; n_qubits must lie in [1, kMaxQubits].
    explicit Statevector(std::size_t n_qubits);

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t size() const { return amplitudes_.size(); }

    std::span<Complex> amplitudes() { return amplitudes_; }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    Complex &operator[](std::size_t k) { return amplitudes_[k]; }
    const Complex &operator[](std::size_t k) const { return amplitudes_[k]; }

    double norm_squared() const;

private:
    std::size_t n_qubits_;
    std::vector<Complex> amplitudes_;
};

/// Gates are exp(-i theta G / 2) with G = X, Z(q0) X(q1) or X(q0) X(q1).
enum class GateKind { rx, rzx, rxx };

struct Gate {
    GateKind kind;
    std::array<std::size_t, 2> qubits{};
    std::size_t param_index = 0;

    std::size_t arity() const { return kind == GateKind::rx ? 1 : 2; }
};

/// Ordered gate list reading its angles from a shared parameter vector.
class AnsatzCircuit {
public:
    AnsatzCircuit() = default;
    AnsatzCircuit(std::size_t n_qubits, std::vector<Gate> gates, std::size_t n_params);

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t n_params() const { return n_params_; }
    const std::vector<Gate> &gates() const { return gates_; }

private:
    std::size_t n_qubits_ = 0;
    std::vector<Gate> gates_;
    std::size_t n_params_ = 0;
};

Statevector init_state(std::size_t n_qubits);

void apply_rx(Statevector &state, std::size_t q, double theta);
/// q1 carries Z, q2 carries X.
void apply_rzx(Statevector &state, std::size_t q1, std::size_t q2, double theta);
void apply_rxx(Statevector &state, std::size_t q1, std::size_t q2, double theta);
void apply_gate(Statevector &state, const Gate &gate, double theta);

/// Applies the Pauli generator G of `gate` (not the rotation) in place.
void apply_generator(Statevector &state, const Gate &gate);

/// Im <bra| G |ket> for the Pauli generator G of `gate`.
double generator_overlap_imag(const Statevector &bra, const Statevector &ket, const Gate &gate);

/// Prepares |0...0> and applies every gate with params[param_index].
Statevector run_circuit(const AnsatzCircuit &circuit, std::span<const double> params);

double expect_z(const Statevector &state, std::size_t q);
double expect_zz(const Statevector &state, std::size_t q1, std::size_t q2);

/// <Z_q> for every qubit in one pass.
std::vector<double> expect_z_all(const Statevector &state);

/// <psi| D |psi> for a diagonal operator given by its 2^n entries.
double expect_diagonal(const Statevector &state, std::span<const double> diagonal);

/// m basis-state indices drawn from |amplitude|^2.
std::vector<std::uint64_t> sample_indices(const Statevector &state, std::size_t m, Rng &rng);

/// m bitstrings (one bit per qubit) drawn from |amplitude|^2.
std::vector<Bits> sample_bits(const Statevector &state, std::size_t m, std::uint64_t seed);

/// Debug dump: one "index re im" line per amplitude.
void write_amplitudes(std::ostream &out, const Statevector &state);

} // namespace edvqe
