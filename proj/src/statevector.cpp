#include "edvqe/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "edvqe/errors.hpp"
#include "edvqe/rng.hpp"

namespace edvqe {

Statevector::Statevector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw CapacityError("statevector supports 1.." + std::to_string(kMaxQubits) +
                            " qubits, requested " + std::to_string(n_qubits));
    }
    amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

double Statevector::norm_squared() const {
    double s = 0.0;
    for (const auto &a : amplitudes_) {
        s += std::norm(a);
    }
    return s;
}

AnsatzCircuit::AnsatzCircuit(std::size_t n_qubits, std::vector<Gate> gates, std::size_t n_params)
    : n_qubits_(n_qubits), gates_(std::move(gates)), n_params_(n_params) {
    std::vector<bool> used(n_params_, false);
    for (const auto &g : gates_) {
        for (std::size_t k = 0; k < g.arity(); ++k) {
            if (g.qubits[k] >= n_qubits_) {
                throw DimensionError("gate qubit index out of range");
            }
        }
        if (g.arity() == 2 && g.qubits[0] == g.qubits[1]) {
            throw DimensionError("two-qubit gate on a single qubit");
        }
        if (g.param_index >= n_params_) {
            throw DimensionError("gate parameter index out of range");
        }
        used[g.param_index] = true;
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw InvalidConfig("circuit declares a parameter no gate uses");
    }
}

Statevector init_state(std::size_t n_qubits) { return Statevector(n_qubits); }

namespace {

void check_qubit(const Statevector &state, std::size_t q) {
    if (q >= state.n_qubits()) {
        throw DimensionError("qubit " + std::to_string(q) + " out of range for " +
                             std::to_string(state.n_qubits()) + " qubits");
    }
}

void check_pair(const Statevector &state, std::size_t q1, std::size_t q2) {
    check_qubit(state, q1);
    check_qubit(state, q2);
    if (q1 == q2) {
        throw DimensionError("two-qubit operation needs distinct qubits");
    }
}

} // namespace

namespace {

// Applies [[c, -i s'], [-i s', c]] to every amplitude pair (k, k ^ flip) with
// k & pivot == 0, where s' = s or -s depending on `sign_bit` of k.
template <bool Signed>
void rotate_pairs(std::span<Complex> amp, std::size_t pivot, std::size_t flip,
                  std::size_t sign_bit, double c, double s) {
    const std::size_t dim = amp.size();
    for (std::size_t base = 0; base < dim; base += 2 * pivot) {
        for (std::size_t k = base; k < base + pivot; ++k) {
            const std::size_t partner = k ^ flip;
            double sk = s;
            if constexpr (Signed) {
                if (k & sign_bit) {
                    sk = -s;
                }
            }
            const double a0r = amp[k].real();
            const double a0i = amp[k].imag();
            const double a1r = amp[partner].real();
            const double a1i = amp[partner].imag();
            amp[k] = Complex(c * a0r + sk * a1i, c * a0i - sk * a1r);
            amp[partner] = Complex(c * a1r + sk * a0i, c * a1i - sk * a0r);
        }
    }
}

} // namespace

void apply_rx(Statevector &state, std::size_t q, double theta) {
    check_qubit(state, q);
    const std::size_t bit = std::size_t{1} << q;
    rotate_pairs<false>(state.amplitudes(), bit, bit, 0, std::cos(theta / 2.0),
                        std::sin(theta / 2.0));
}

void apply_rzx(Statevector &state, std::size_t q1, std::size_t q2, double theta) {
    check_pair(state, q1, q2);
    const std::size_t xbit = std::size_t{1} << q2;
    // Z eigenvalue of q1 flips the sign of the X rotation on q2.
    rotate_pairs<true>(state.amplitudes(), xbit, xbit, std::size_t{1} << q1,
                       std::cos(theta / 2.0), std::sin(theta / 2.0));
}

void apply_rxx(Statevector &state, std::size_t q1, std::size_t q2, double theta) {
    check_pair(state, q1, q2);
    const std::size_t b1 = std::size_t{1} << q1;
    const std::size_t mask = b1 | (std::size_t{1} << q2);
    rotate_pairs<false>(state.amplitudes(), b1, mask, 0, std::cos(theta / 2.0),
                        std::sin(theta / 2.0));
}

void apply_gate(Statevector &state, const Gate &gate, double theta) {
    switch (gate.kind) {
    case GateKind::rx:
        apply_rx(state, gate.qubits[0], theta);
        break;
    case GateKind::rzx:
        apply_rzx(state, gate.qubits[0], gate.qubits[1], theta);
        break;
    case GateKind::rxx:
        apply_rxx(state, gate.qubits[0], gate.qubits[1], theta);
        break;
    }
}

void apply_generator(Statevector &state, const Gate &gate) {
    auto amp = state.amplitudes();
    const std::size_t b0 = std::size_t{1} << gate.qubits[0];
    switch (gate.kind) {
    case GateKind::rx:
        check_qubit(state, gate.qubits[0]);
        for (std::size_t k = 0; k < amp.size(); ++k) {
            if (!(k & b0)) {
                std::swap(amp[k], amp[k | b0]);
            }
        }
        break;
    case GateKind::rzx: {
        check_pair(state, gate.qubits[0], gate.qubits[1]);
        const std::size_t xbit = std::size_t{1} << gate.qubits[1];
        for (std::size_t k = 0; k < amp.size(); ++k) {
            if (k & xbit) {
                continue;
            }
            std::swap(amp[k], amp[k | xbit]);
            if (k & b0) {
                amp[k] = -amp[k];
                amp[k | xbit] = -amp[k | xbit];
            }
        }
        break;
    }
    case GateKind::rxx: {
        check_pair(state, gate.qubits[0], gate.qubits[1]);
        const std::size_t mask = b0 | (std::size_t{1} << gate.qubits[1]);
        for (std::size_t k = 0; k < amp.size(); ++k) {
            if (!(k & b0)) {
                std::swap(amp[k], amp[k ^ mask]);
            }
        }
        break;
    }
    }
}

double generator_overlap_imag(const Statevector &bra, const Statevector &ket, const Gate &gate) {
    if (bra.n_qubits() != ket.n_qubits()) {
        throw DimensionError("states of different widths");
    }
    auto b = bra.amplitudes();
    auto k = ket.amplitudes();
    const std::size_t b0 = std::size_t{1} << gate.qubits[0];
    std::size_t flip = b0;
    std::size_t sign_bit = 0;
    switch (gate.kind) {
    case GateKind::rx:
        check_qubit(ket, gate.qubits[0]);
        break;
    case GateKind::rzx:
        check_pair(ket, gate.qubits[0], gate.qubits[1]);
        flip = std::size_t{1} << gate.qubits[1];
        sign_bit = b0;
        break;
    case GateKind::rxx:
        check_pair(ket, gate.qubits[0], gate.qubits[1]);
        flip = b0 | (std::size_t{1} << gate.qubits[1]);
        break;
    }
    // Visit each pair (i, i ^ flip) once, i having the lowest flipped bit clear.
    const std::size_t pivot = flip & (~flip + 1);
    double plus = 0.0;
    double minus = 0.0;
    for (std::size_t base = 0; base < b.size(); base += 2 * pivot) {
        for (std::size_t i = base; i < base + pivot; ++i) {
            const std::size_t j = i ^ flip;
            const double term = b[i].real() * k[j].imag() - b[i].imag() * k[j].real() +
                                b[j].real() * k[i].imag() - b[j].imag() * k[i].real();
            if (i & sign_bit) {
                minus += term;
            } else {
                plus += term;
            }
        }
    }
    return plus - minus;
}

Statevector run_circuit(const AnsatzCircuit &circuit, std::span<const double> params) {
    if (params.size() != circuit.n_params()) {
        throw DimensionError("circuit expects " + std::to_string(circuit.n_params()) +
                             " parameters, got " + std::to_string(params.size()));
    }
    Statevector state(circuit.n_qubits());
    for (const auto &g : circuit.gates()) {
        apply_gate(state, g, params[g.param_index]);
    }
    return state;
}

double expect_z(const Statevector &state, std::size_t q) {
    check_qubit(state, q);
    const std::size_t bit = std::size_t{1} << q;
    double e = 0.0;
    auto amp = state.amplitudes();
    for (std::size_t k = 0; k < amp.size(); ++k) {
        const double p = std::norm(amp[k]);
        e += (k & bit) ? -p : p;
    }
    return e;
}

double expect_zz(const Statevector &state, std::size_t q1, std::size_t q2) {
    check_pair(state, q1, q2);
    const std::size_t mask = (std::size_t{1} << q1) | (std::size_t{1} << q2);
    double e = 0.0;
    auto amp = state.amplitudes();
    for (std::size_t k = 0; k < amp.size(); ++k) {
        const double p = std::norm(amp[k]);
        e += (std::popcount(k & mask) & 1) ? -p : p;
    }
    return e;
}

std::vector<double> expect_z_all(const Statevector &state) {
    const std::size_t n = state.n_qubits();
    auto amp = state.amplitudes();
    std::vector<double> p(amp.size());
    double total = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) {
        p[k] = std::norm(amp[k]);
        total += p[k];
    }
    // <Z_q> = total - 2 * (probability mass with bit q set).
    std::vector<double> z(n, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        double ones = 0.0;
        for (std::size_t base = bit; base < p.size(); base += 2 * bit) {
            for (std::size_t k = base; k < base + bit; ++k) {
                ones += p[k];
            }
        }
        z[q] = total - 2.0 * ones;
    }
    return z;
}

double expect_diagonal(const Statevector &state, std::span<const double> diagonal) {
    if (diagonal.size() != state.size()) {
        throw DimensionError("diagonal operator size does not match the state");
    }
    double e = 0.0;
    auto amp = state.amplitudes();
    for (std::size_t k = 0; k < amp.size(); ++k) {
        e += std::norm(amp[k]) * diagonal[k];
    }
    return e;
}

std::vector<std::uint64_t> sample_indices(const Statevector &state, std::size_t m, Rng &rng) {
    auto amp = state.amplitudes();
    std::vector<double> cumulative(amp.size());
    double running = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) {
        running += std::norm(amp[k]);
        cumulative[k] = running;
    }
    std::vector<std::uint64_t> out;
    out.reserve(m);
    for (std::size_t s = 0; s < m; ++s) {
        // Scale by the accumulated total so rounding in the norm cannot
        // leave the draw past the last bucket.
        const double u = rng.uniform() * running;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
        k = std::min(k, amp.size() - 1);
        out.push_back(k);
    }
    return out;
}

std::vector<Bits> sample_bits(const Statevector &state, std::size_t m, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Bits> out;
    out.reserve(m);
    for (auto k : sample_indices(state, m, rng)) {
        Bits bits(state.n_qubits());
        for (std::size_t q = 0; q < bits.size(); ++q) {
            bits[q] = static_cast<std::uint8_t>((k >> q) & 1);
        }
        out.push_back(std::move(bits));
    }
    return out;
}

void write_amplitudes(std::ostream &out, const Statevector &state) {
    out << std::setprecision(17);
    auto amp = state.amplitudes();
    for (std::size_t k = 0; k < amp.size(); ++k) {
        out << k << ' ' << amp[k].real() << ' ' << amp[k].imag() << '\n';
    }
}

} // namespace edvqe
