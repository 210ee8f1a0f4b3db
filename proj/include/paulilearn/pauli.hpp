#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "paulilearn/errors.hpp"
#include "paulilearn/rng.hpp"

namespace paulilearn {

/// An n-qubit Pauli modulo phase, encoded as the bit-vector pair (x, z):
/// qubit j carries X iff bit j of x is set, Z iff bit j of z is set, and
/// Y iff both are. Group addition is componentwise XOR.
///
/// Capacity is one machine word per half, i.e. n <= 64 qubits; every
/// experiment in this library fits (joint system+ancilla labels top out at
/// 64 qubits). Text form is a string over {I,X,Y,Z} with the leftmost
/// character on qubit 0.
struct PauliLabel {
  uint32_t n = 0;
  uint64_t x = 0;
  uint64_t z = 0;

  PauliLabel() = default;
  PauliLabel(uint32_t n_, uint64_t x_, uint64_t z_) : n(n_), x(x_), z(z_) {
    check_capacity(n_);
    const uint64_t m = mask();
    x &= m;
    z &= m;
  }

  static void check_capacity(uint32_t n) {
    if (n > 64) throw CapacityError("PauliLabel supports at most 64 qubits, got " + std::to_string(n));
  }

  static PauliLabel identity(uint32_t n) { return PauliLabel(n, 0, 0); }

  uint64_t mask() const { return n >= 64 ? ~0ULL : ((1ULL << n) - 1); }

  bool is_identity() const { return x == 0 && z == 0; }

  /// 2-bit code of qubit q: 0=I, 1=X, 2=Z, 3=Y.
  unsigned code(uint32_t q) const {
    return static_cast<unsigned>(((x >> q) & 1) | (((z >> q) & 1) << 1));
  }

  PauliLabel& set_code(uint32_t q, unsigned c) {
    x = (x & ~(1ULL << q)) | (static_cast<uint64_t>(c & 1) << q);
    z = (z & ~(1ULL << q)) | (static_cast<uint64_t>((c >> 1) & 1) << q);
    return *this;
  }

  PauliLabel operator^(const PauliLabel& o) const {
    require_same_n(o);
    return PauliLabel(n, x ^ o.x, z ^ o.z);
  }
  PauliLabel& operator^=(const PauliLabel& o) {
    require_same_n(o);
    x ^= o.x;
    z ^= o.z;
    return *this;
  }
  bool operator==(const PauliLabel& o) const { return n == o.n && x == o.x && z == o.z; }
  bool operator!=(const PauliLabel& o) const { return !(*this == o); }
  bool operator<(const PauliLabel& o) const {
    if (x != o.x) return x < o.x;
    return z < o.z;
  }

  void require_same_n(const PauliLabel& o) const {
    if (n != o.n)
      throw DimensionError("Pauli label qubit counts differ: " + std::to_string(n) + " vs " +
                           std::to_string(o.n));
  }

  /// Restriction to qubits [offset, offset+m).
  PauliLabel slice(uint32_t offset, uint32_t m) const {
    const uint64_t msk = m >= 64 ? ~0ULL : ((1ULL << m) - 1);
    return PauliLabel(m, (x >> offset) & msk, (z >> offset) & msk);
  }

  static std::string code_names() { return "IXZY"; }

  std::string str() const {
    std::string s(n, 'I');
    for (uint32_t q = 0; q < n; ++q) s[q] = code_names()[code(q)];
    return s;
  }

  static PauliLabel parse(std::string_view s) {
    check_capacity(static_cast<uint32_t>(s.size()));
    PauliLabel a(static_cast<uint32_t>(s.size()), 0, 0);
    for (uint32_t q = 0; q < a.n; ++q) {
      switch (s[q]) {
        case 'I': break;
        case 'X': a.x |= 1ULL << q; break;
        case 'Z': a.z |= 1ULL << q; break;
        case 'Y': a.x |= 1ULL << q; a.z |= 1ULL << q; break;
        default:
          throw DomainError(std::string("invalid Pauli character '") + s[q] + "'");
      }
    }
    return a;
  }

  static PauliLabel random(uint32_t n, Rng& rng) {
    check_capacity(n);
    const uint64_t m = n >= 64 ? ~0ULL : ((1ULL << n) - 1);
    return PauliLabel(n, rng() & m, rng() & m);
  }
};

/// Symplectic inner product over GF(2); 0 iff the operators commute.
inline unsigned symplectic_inner(const PauliLabel& a, const PauliLabel& b) {
  a.require_same_n(b);
  return static_cast<unsigned>((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1);
}

/// Bit j set iff the Pauli acts nontrivially on qubit j.
inline uint64_t pattern(const PauliLabel& a) { return a.x | a.z; }

/// Hamming weight of the pattern.
inline int weight(const PauliLabel& a) { return std::popcount(pattern(a)); }

/// A Hermitian Pauli with its sign. Clifford conjugation keeps Hermitian
/// Paulis Hermitian, so the sign is always +1 or -1.
struct SignedPauli {
  PauliLabel label;
  int sign = +1;

  bool operator==(const SignedPauli& o) const { return label == o.label && sign == o.sign; }
};

/// Phase exponent k (mod 4) in P_a P_b = i^k P_{a^b}, with the Hermitian
/// convention P_a = prod_j i^{x_j z_j} X^{x_j} Z^{z_j}.
inline int pauli_product_phase(const PauliLabel& a, const PauliLabel& b) {
  a.require_same_n(b);
  const int k = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) +
                2 * std::popcount(a.z & b.x) -
                std::popcount((a.x ^ b.x) & (a.z ^ b.z));
  return ((k % 4) + 4) % 4;
}

/// Pauli with an accumulated i^phase factor. Intermediate products during
/// Clifford conjugation pick up odd powers of i; only the final result is
/// required to be Hermitian.
struct PhasedPauli {
  PauliLabel label;
  int phase = 0;  // exponent of i, mod 4

  PhasedPauli& operator*=(const PauliLabel& b) {
    phase = (phase + pauli_product_phase(label, b)) % 4;
    label ^= b;
    return *this;
  }

  SignedPauli to_signed() const {
    if (phase % 2 != 0)
      throw DomainError("Pauli product is not Hermitian (phase i^" + std::to_string(phase) + ")");
    return SignedPauli{label, phase == 0 ? +1 : -1};
  }
};

}  // namespace paulilearn
