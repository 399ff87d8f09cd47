#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace steaneft {

// Raised when an internal consistency guarantee is broken (oracle
// disagreement, inference-table collision, engine misuse). The CLI maps
// this to exit code 3.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Raised for malformed user configuration; CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Single-qubit Pauli with bit 0 = X component, bit 1 = Z component.
// Y is exactly the simultaneous presence of both components.
enum class PauliOp : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline bool pauli_has_x(PauliOp p) { return static_cast<uint8_t>(p) & 1u; }
inline bool pauli_has_z(PauliOp p) { return static_cast<uint8_t>(p) & 2u; }

inline PauliOp pauli_from_bits(bool x, bool z) {
  return static_cast<PauliOp>((x ? 1u : 0u) | (z ? 2u : 0u));
}

inline char pauli_char(PauliOp p) {
  switch (p) {
    case PauliOp::I: return 'I';
    case PauliOp::X: return 'X';
    case PauliOp::Z: return 'Z';
    case PauliOp::Y: return 'Y';
  }
  return '?';
}

// Phase-free n-qubit Pauli operator stored as X/Z bit masks over at most
// 64 qubits. Composition is bitwise XOR; global phases are never tracked.
struct PauliFrame {
  int n_qubits = 0;
  uint64_t x_bits = 0;
  uint64_t z_bits = 0;

  PauliFrame() = default;
  explicit PauliFrame(int n) : n_qubits(n) {
    if (n < 0 || n > 64) throw ContractViolation("PauliFrame supports 0..64 qubits");
  }

  bool is_identity() const { return x_bits == 0 && z_bits == 0; }

  PauliOp pauli_at(int q) const {
    return pauli_from_bits((x_bits >> q) & 1u, (z_bits >> q) & 1u);
  }

  void apply_pauli(int q, PauliOp p) {
    x_bits ^= static_cast<uint64_t>(pauli_has_x(p) ? 1u : 0u) << q;
    z_bits ^= static_cast<uint64_t>(pauli_has_z(p) ? 1u : 0u) << q;
  }

  // Group composition: frames form a GF(2) vector space.
  void compose(const PauliFrame& other) {
    x_bits ^= other.x_bits;
    z_bits ^= other.z_bits;
  }

  int weight() const { return std::popcount(x_bits | z_bits); }

  std::string to_string() const {
    std::string s;
    for (int q = 0; q < n_qubits; ++q) s.push_back(pauli_char(pauli_at(q)));
    return s;
  }
};

inline bool operator==(const PauliFrame& a, const PauliFrame& b) {
  return a.n_qubits == b.n_qubits && a.x_bits == b.x_bits && a.z_bits == b.z_bits;
}

inline int parity64(uint64_t v) { return std::popcount(v) & 1; }

}  // namespace steaneft
