#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "paulilearn/errors.hpp"
#include "paulilearn/pauli.hpp"

namespace paulilearn {

/// An n-qubit Clifford acting on Pauli labels: a 2n x 2n symplectic matrix
/// over GF(2) stored as the signed images of the generators X_j, Z_j, which
/// also carry the conjugation signs.
///
/// The map is C(P) = C P C^dagger. Composition, inversion, and embedding
/// into larger registers are supported; all instances are immutable values
/// after construction.
class CliffordMap {
 public:
  explicit CliffordMap(uint32_t n) : n_(n) {
    PauliLabel::check_capacity(n);
    img_x_.reserve(n);
    img_z_.reserve(n);
    for (uint32_t q = 0; q < n; ++q) {
      img_x_.push_back({PauliLabel(n, 1ULL << q, 0), +1});
      img_z_.push_back({PauliLabel(n, 0, 1ULL << q), +1});
    }
  }

  uint32_t n() const { return n_; }

  const SignedPauli& image_of_x(uint32_t q) const { return img_x_[q]; }
  const SignedPauli& image_of_z(uint32_t q) const { return img_z_[q]; }

  /// Conjugate a Pauli: label part is the symplectic action, sign from the
  /// standard tableau update.
  SignedPauli apply(const PauliLabel& a) const {
    if (a.n != n_) throw DimensionError("CliffordMap.apply: label has wrong qubit count");
    PhasedPauli acc{PauliLabel::identity(n_), std::popcount(a.x & a.z) % 4};
    for (uint64_t bits = a.x; bits; bits &= bits - 1) {
      const auto& img = img_x_[static_cast<uint32_t>(std::countr_zero(bits))];
      acc *= img.label;
      if (img.sign < 0) acc.phase = (acc.phase + 2) % 4;
    }
    for (uint64_t bits = a.z; bits; bits &= bits - 1) {
      const auto& img = img_z_[static_cast<uint32_t>(std::countr_zero(bits))];
      acc *= img.label;
      if (img.sign < 0) acc.phase = (acc.phase + 2) % 4;
    }
    return acc.to_signed();
  }

  /// Label part of the action only.
  PauliLabel apply_label(const PauliLabel& a) const {
    if (a.n != n_) throw DimensionError("CliffordMap.apply_label: label has wrong qubit count");
    uint64_t x = 0, z = 0;
    for (uint64_t bits = a.x; bits; bits &= bits - 1) {
      const auto& l = img_x_[static_cast<uint32_t>(std::countr_zero(bits))].label;
      x ^= l.x;
      z ^= l.z;
    }
    for (uint64_t bits = a.z; bits; bits &= bits - 1) {
      const auto& l = img_z_[static_cast<uint32_t>(std::countr_zero(bits))].label;
      x ^= l.x;
      z ^= l.z;
    }
    return PauliLabel(n_, x, z);
  }

  /// this o other (apply `other` first).
  CliffordMap compose(const CliffordMap& other) const {
    if (n_ != other.n_) throw DimensionError("CliffordMap.compose: size mismatch");
    CliffordMap out(n_);
    for (uint32_t q = 0; q < n_; ++q) {
      out.img_x_[q] = apply_signed(other.img_x_[q]);
      out.img_z_[q] = apply_signed(other.img_z_[q]);
    }
    return out;
  }

  CliffordMap inverse() const {
    CliffordMap out(n_);
    // The symplectic inverse is Omega S^T Omega; rebuilt here by solving for
    // each generator image via the bilinear form, then fixing signs so that
    // the round trip is +1.
    for (uint32_t q = 0; q < n_; ++q) {
      out.img_x_[q].label = preimage(PauliLabel(n_, 1ULL << q, 0));
      out.img_z_[q].label = preimage(PauliLabel(n_, 0, 1ULL << q));
    }
    for (uint32_t q = 0; q < n_; ++q) {
      out.img_x_[q].sign = apply(out.img_x_[q].label).sign;
      out.img_z_[q].sign = apply(out.img_z_[q].label).sign;
    }
    return out;
  }

  bool is_symplectic() const {
    for (uint32_t i = 0; i < 2 * n_; ++i) {
      for (uint32_t j = i; j < 2 * n_; ++j) {
        const PauliLabel bi = basis(i), bj = basis(j);
        if (symplectic_inner(apply_label(bi), apply_label(bj)) != symplectic_inner(bi, bj))
          return false;
      }
    }
    return true;
  }

  bool label_action_is_identity() const {
    for (uint32_t q = 0; q < n_; ++q) {
      if (img_x_[q].label != PauliLabel(n_, 1ULL << q, 0)) return false;
      if (img_z_[q].label != PauliLabel(n_, 0, 1ULL << q)) return false;
    }
    return true;
  }

  bool operator==(const CliffordMap& o) const {
    return n_ == o.n_ && img_x_ == o.img_x_ && img_z_ == o.img_z_;
  }

  // ---- constructors ----

  static CliffordMap identity(uint32_t n) { return CliffordMap(n); }

  static CliffordMap cnot(uint32_t control, uint32_t target, uint32_t n) {
    CliffordMap c(n);
    // X_c -> X_c X_t, Z_t -> Z_c Z_t; the other generators are fixed.
    c.img_x_[control].label.x |= 1ULL << target;
    c.img_z_[target].label.z |= 1ULL << control;
    return c;
  }

  static CliffordMap swap(uint32_t q1, uint32_t q2, uint32_t n) {
    CliffordMap c(n);
    std::swap(c.img_x_[q1], c.img_x_[q2]);
    std::swap(c.img_z_[q1], c.img_z_[q2]);
    return c;
  }

  /// Echoed cross-resonance gate, fixed from the (IX - XY)/sqrt(2)
  /// convention: X0 -> X0, Z0 -> Y0 Z1, X1 -> -X0 Y1, Z1 -> -Z1.
  /// Equal to CNOT up to single-qubit Cliffords and an involution.
  static CliffordMap ecr(uint32_t q1, uint32_t q2, uint32_t n) {
    CliffordMap c(n);
    c.img_x_[q1] = {PauliLabel(n, 1ULL << q1, 0), +1};
    c.img_z_[q1] = {PauliLabel(n, 1ULL << q1, (1ULL << q1) | (1ULL << q2)), +1};
    c.img_x_[q2] = {PauliLabel(n, (1ULL << q1) | (1ULL << q2), 1ULL << q2), -1};
    c.img_z_[q2] = {PauliLabel(n, 0, 1ULL << q2), -1};
    return c;
  }

  /// One of the 24 single-qubit Cliffords acting on qubit q of an n-qubit
  /// register. Index layout: index = 4 * ix + iz where ix in [0,6) picks the
  /// signed image of X and iz in [0,4) the signed image of Z among the two
  /// anticommuting choices, in a fixed canonical order.
  static CliffordMap single_qubit(unsigned index, uint32_t q, uint32_t n) {
    if (index >= 24) throw DomainError("single-qubit Clifford index out of range");
    static constexpr unsigned kPaulis[3] = {1, 2, 3};  // X, Z, Y codes
    const unsigned ix = index / 4, iz = index % 4;
    const unsigned px = kPaulis[ix / 2];
    const int sx = (ix % 2) ? -1 : +1;
    unsigned others[2];
    unsigned o = 0;
    for (unsigned p : kPaulis)
      if (p != px) others[o++] = p;
    const unsigned pz = others[iz / 2];
    const int sz = (iz % 2) ? -1 : +1;

    CliffordMap c(n);
    c.img_x_[q] = {PauliLabel(n, 0, 0).set_code(q, px), sx};
    c.img_z_[q] = {PauliLabel(n, 0, 0).set_code(q, pz), sz};
    return c;
  }

  /// Conjugation by a Pauli gate: label action is the identity, signs flip
  /// on anticommuting generators.
  static CliffordMap pauli_conjugation(const PauliLabel& p) {
    CliffordMap c(p.n);
    for (uint32_t q = 0; q < p.n; ++q) {
      if (symplectic_inner(p, c.img_x_[q].label)) c.img_x_[q].sign = -1;
      if (symplectic_inner(p, c.img_z_[q].label)) c.img_z_[q].sign = -1;
    }
    return c;
  }

  /// A layer of single-qubit Cliffords given by their indices, one per qubit.
  static CliffordMap single_qubit_layer(const std::vector<unsigned>& indices) {
    const uint32_t n = static_cast<uint32_t>(indices.size());
    CliffordMap c(n);
    for (uint32_t q = 0; q < n; ++q) {
      const CliffordMap g = single_qubit(indices[q], q, n);
      c.img_x_[q] = g.img_x_[q];
      c.img_z_[q] = g.img_z_[q];
    }
    return c;
  }

  /// Embed an m-qubit map into n qubits starting at `offset`.
  CliffordMap embed(uint32_t offset, uint32_t n) const {
    if (offset + n_ > n) throw DimensionError("CliffordMap.embed: does not fit");
    CliffordMap out(n);
    for (uint32_t q = 0; q < n_; ++q) {
      out.img_x_[offset + q] = {PauliLabel(n, img_x_[q].label.x << offset, img_x_[q].label.z << offset), img_x_[q].sign};
      out.img_z_[offset + q] = {PauliLabel(n, img_z_[q].label.x << offset, img_z_[q].label.z << offset), img_z_[q].sign};
    }
    return out;
  }

  /// Parse the text form used in config files: "identity", "cnot 0 1",
  /// "ecr 0 1", "swap 0 1", "sq <index> <qubit>".
  static CliffordMap parse(const std::string& spec, uint32_t n) {
    std::istringstream ss(spec);
    std::string name;
    ss >> name;
    auto read_q = [&]() -> uint32_t {
      long long v = -1;
      ss >> v;
      if (v < 0 || static_cast<uint64_t>(v) >= n)
        throw ConfigError("gate spec '" + spec + "': qubit index out of range");
      return static_cast<uint32_t>(v);
    };
    if (name == "identity" || name == "id") return identity(n);
    if (name == "cnot") {
      const uint32_t a = read_q(), b = read_q();
      return cnot(a, b, n);
    }
    if (name == "swap") {
      const uint32_t a = read_q(), b = read_q();
      return swap(a, b, n);
    }
    if (name == "ecr") {
      const uint32_t a = read_q(), b = read_q();
      return ecr(a, b, n);
    }
    if (name == "sq") {
      long long idx = -1;
      ss >> idx;
      if (idx < 0 || idx >= 24) throw ConfigError("gate spec '" + spec + "': bad Clifford index");
      return single_qubit(static_cast<unsigned>(idx), read_q(), n);
    }
    throw ConfigError("unknown gate spec '" + spec + "'");
  }

 private:
  SignedPauli apply_signed(const SignedPauli& p) const {
    SignedPauli out = apply(p.label);
    out.sign *= p.sign;
    return out;
  }

  PauliLabel basis(uint32_t i) const {
    return i < n_ ? PauliLabel(n_, 1ULL << i, 0) : PauliLabel(n_, 0, 1ULL << (i - n_));
  }

  /// Solve C(b) = target for b using the invariance of the symplectic form:
  /// the coordinates of b are recovered as <target, C(e_k)> pairings.
  PauliLabel preimage(const PauliLabel& target) const {
    PauliLabel b(n_, 0, 0);
    for (uint32_t q = 0; q < n_; ++q) {
      // <b, z_q> = x-bit q of b; <b, x_q> = z-bit q of b.
      if (symplectic_inner(target, img_z_[q].label)) b.x |= 1ULL << q;
      if (symplectic_inner(target, img_x_[q].label)) b.z |= 1ULL << q;
    }
    return b;
  }

  uint32_t n_;
  std::vector<SignedPauli> img_x_, img_z_;
};

/// Smallest d0 >= 1 such that G^d0 fixes every label (signs ignored).
inline int gate_period(const CliffordMap& g, int cap = 4096) {
  CliffordMap power = g;
  for (int d = 1; d <= cap; ++d) {
    if (power.label_action_is_identity()) return d;
    power = g.compose(power);
  }
  throw DomainError("gate_period: no period found within cap " + std::to_string(cap));
}

/// Gate-conjugation orbit of a label: [a, G(a), G^2(a), ...] with signs
/// stripped, following the symmetrized-eigenvalue convention.
struct PauliOrbit {
  PauliLabel representative;
  std::vector<PauliLabel> members;
  int period = 1;
};

inline PauliOrbit orbit(const CliffordMap& g, const PauliLabel& a, int cap = 4096) {
  PauliOrbit out;
  out.representative = a;
  out.members.push_back(a);
  PauliLabel cur = g.apply_label(a);
  while (cur != a) {
    if (static_cast<int>(out.members.size()) >= cap)
      throw DomainError("orbit: period exceeds cap");
    out.members.push_back(cur);
    cur = g.apply_label(cur);
  }
  out.period = static_cast<int>(out.members.size());
  return out;
}

/// Label action of a single-qubit Clifford as a permutation of {X, Z, Y}:
/// the 24 Cliffords realize the 6 permutations, four each, so uniform
/// twirling draws reduce to uniform draws over these. Codes are 0=I, 1=X,
/// 2=Z, 3=Y; Y = X xor Z keeps the map closed under code XOR.
struct PauliPermutation {
  std::array<uint8_t, 4> img{0, 1, 2, 3};

  static constexpr int count = 6;

  static PauliPermutation from_images(unsigned px, unsigned pz) {
    PauliPermutation p;
    p.img = {0, static_cast<uint8_t>(px), static_cast<uint8_t>(pz),
             static_cast<uint8_t>(px ^ pz)};
    return p;
  }

  static const std::array<PauliPermutation, 6>& all() {
    static const std::array<PauliPermutation, 6> table = [] {
      std::array<PauliPermutation, 6> t{};
      int k = 0;
      for (unsigned px = 1; px <= 3; ++px)
        for (unsigned pz = 1; pz <= 3; ++pz)
          if (px != pz) t[k++] = from_images(px, pz);
      return t;
    }();
    return table;
  }

  unsigned operator()(unsigned code) const { return img[code]; }

  PauliPermutation then(const PauliPermutation& outer) const {
    PauliPermutation p;
    for (unsigned c = 0; c < 4; ++c) p.img[c] = outer.img[img[c]];
    return p;
  }

  PauliPermutation inverse() const {
    PauliPermutation p;
    for (unsigned c = 0; c < 4; ++c) p.img[img[c]] = static_cast<uint8_t>(c);
    return p;
  }

  bool operator==(const PauliPermutation& o) const { return img == o.img; }
};

/// Label permutation of CliffordMap::single_qubit(index, ...); each of the 6
/// permutations is realized by exactly 4 of the 24 indices.
inline PauliPermutation perm_of_single_qubit_clifford(unsigned index) {
  static const std::array<PauliPermutation, 24> table = [] {
    std::array<PauliPermutation, 24> t{};
    constexpr unsigned kPaulis[3] = {1, 2, 3};
    for (unsigned i = 0; i < 24; ++i) {
      const unsigned ix = i / 4, iz = i % 4;
      const unsigned px = kPaulis[ix / 2];
      unsigned others[2];
      unsigned o = 0;
      for (unsigned p : kPaulis)
        if (p != px) others[o++] = p;
      t[i] = PauliPermutation::from_images(px, others[iz / 2]);
    }
    return t;
  }();
  return table[index];
}

}  // namespace paulilearn
