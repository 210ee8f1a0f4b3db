#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <map>
#include <numeric>
#include <set>

#include "paulilearn/clifford.hpp"

using namespace paulilearn;

namespace {

CliffordMap random_composed_clifford(uint32_t n, Rng& rng, int gates = 12) {
  CliffordMap c = CliffordMap::identity(n);
  for (int g = 0; g < gates; ++g) {
    switch (rng.bounded(4)) {
      case 0: {
        c = CliffordMap::single_qubit(static_cast<unsigned>(rng.bounded(24)),
                                      static_cast<uint32_t>(rng.bounded(n)), n)
                .compose(c);
        break;
      }
      case 1: {
        if (n < 2) break;
        uint32_t a = static_cast<uint32_t>(rng.bounded(n)), b;
        do {
          b = static_cast<uint32_t>(rng.bounded(n));
        } while (b == a);
        c = CliffordMap::cnot(a, b, n).compose(c);
        break;
      }
      case 2: {
        if (n < 2) break;
        uint32_t a = static_cast<uint32_t>(rng.bounded(n)), b;
        do {
          b = static_cast<uint32_t>(rng.bounded(n));
        } while (b == a);
        c = CliffordMap::ecr(a, b, n).compose(c);
        break;
      }
      default: {
        if (n < 2) break;
        uint32_t a = static_cast<uint32_t>(rng.bounded(n)), b;
        do {
          b = static_cast<uint32_t>(rng.bounded(n));
        } while (b == a);
        c = CliffordMap::swap(a, b, n).compose(c);
        break;
      }
    }
  }
  return c;
}

}  // namespace

TEST_CASE("cnot conjugation matches the textbook action") {
  const CliffordMap cx = CliffordMap::cnot(0, 1, 2);
  CHECK(cx.apply(PauliLabel::parse("XI")) == SignedPauli{PauliLabel::parse("XX"), +1});
  CHECK(cx.apply(PauliLabel::parse("IZ")) == SignedPauli{PauliLabel::parse("ZZ"), +1});
  CHECK(cx.apply(PauliLabel::parse("YI")) == SignedPauli{PauliLabel::parse("YX"), +1});
  CHECK(cx.apply(PauliLabel::parse("II")) == SignedPauli{PauliLabel::identity(2), +1});
  Rng rng(3, 0);
  const CliffordMap any = random_composed_clifford(3, rng);
  CHECK(any.apply(PauliLabel::identity(3)) == SignedPauli{PauliLabel::identity(3), +1});
  CHECK_THROWS_AS(cx.apply(PauliLabel::identity(3)), DimensionError);
}

TEST_CASE("constructors are symplectic") {
  CHECK(CliffordMap::cnot(0, 1, 2).is_symplectic());
  CHECK(CliffordMap::ecr(0, 1, 2).is_symplectic());
  CHECK(CliffordMap::swap(0, 1, 2).is_symplectic());
  for (unsigned i = 0; i < 24; ++i) CHECK(CliffordMap::single_qubit(i, 0, 1).is_symplectic());
  Rng rng(17, 0);
  for (int rep = 0; rep < 10; ++rep) CHECK(random_composed_clifford(4, rng).is_symplectic());
}

TEST_CASE("the 24 single-qubit cliffords are distinct signed maps") {
  std::set<std::pair<std::pair<std::string, int>, std::pair<std::string, int>>> seen;
  for (unsigned i = 0; i < 24; ++i) {
    const CliffordMap c = CliffordMap::single_qubit(i, 0, 1);
    const SignedPauli ix = c.image_of_x(0), iz = c.image_of_z(0);
    seen.insert({{ix.label.str(), ix.sign}, {iz.label.str(), iz.sign}});
    // label action must match the compact permutation table
    const PauliPermutation p = perm_of_single_qubit_clifford(i);
    for (unsigned code = 0; code < 4; ++code) {
      PauliLabel in(1, code & 1, (code >> 1) & 1);
      CHECK(c.apply_label(in).code(0) == p(code));
    }
  }
  CHECK(seen.size() == 24);
  // 6 label permutations, four realizations each
  std::map<std::array<uint8_t, 4>, int> perm_count;
  for (unsigned i = 0; i < 24; ++i) perm_count[perm_of_single_qubit_clifford(i).img] += 1;
  CHECK(perm_count.size() == 6);
  for (const auto& [img, count] : perm_count) CHECK(count == 4);
}

TEST_CASE("pauli permutation composition and inverse") {
  for (const auto& p : PauliPermutation::all()) {
    CHECK(p.then(p.inverse()) == PauliPermutation{});
    CHECK(p.inverse().then(p) == PauliPermutation{});
    CHECK(p(0) == 0);
    CHECK((p(1) ^ p(2)) == p(3));  // Y = X xor Z is preserved
  }
}

TEST_CASE("conjugation preserves commutation") {
  Rng rng(99, 0);
  for (int rep = 0; rep < 60; ++rep) {
    const uint32_t n = 2 + static_cast<uint32_t>(rng.bounded(3));
    const CliffordMap c = random_composed_clifford(n, rng);
    const PauliLabel a = PauliLabel::random(n, rng);
    const PauliLabel b = PauliLabel::random(n, rng);
    CHECK(symplectic_inner(c.apply_label(a), c.apply_label(b)) == symplectic_inner(a, b));
  }
}

TEST_CASE("inverse undoes conjugation with sign") {
  Rng rng(7, 1);
  for (int rep = 0; rep < 40; ++rep) {
    const uint32_t n = 1 + static_cast<uint32_t>(rng.bounded(3));
    const CliffordMap c = random_composed_clifford(n, rng);
    const CliffordMap inv = c.inverse();
    const PauliLabel a = PauliLabel::random(n, rng);
    const SignedPauli forward = c.apply(a);
    const SignedPauli back = inv.apply(forward.label);
    CHECK(back.label == a);
    CHECK(back.sign * forward.sign == +1);
    CHECK(inv.compose(c).label_action_is_identity());
  }
}

TEST_CASE("composition is associative") {
  Rng rng(21, 4);
  const CliffordMap a = random_composed_clifford(3, rng);
  const CliffordMap b = random_composed_clifford(3, rng);
  const CliffordMap c = random_composed_clifford(3, rng);
  CHECK(a.compose(b).compose(c) == a.compose(b.compose(c)));
  CHECK(CliffordMap::identity(3).compose(a) == a);
  CHECK(a.compose(CliffordMap::identity(3)) == a);
}

TEST_CASE("gate periods of the named gates") {
  CHECK(gate_period(CliffordMap::identity(3)) == 1);
  CHECK(gate_period(CliffordMap::cnot(0, 1, 2)) == 2);
  CHECK(gate_period(CliffordMap::swap(0, 1, 2)) == 2);
  CHECK(gate_period(CliffordMap::ecr(0, 1, 2)) == 2);
  CHECK_THROWS_AS(gate_period(CliffordMap::cnot(0, 1, 2), 1), DomainError);
}

TEST_CASE("cnot orbits reproduce the nine symmetrized classes") {
  const CliffordMap cx = CliffordMap::cnot(0, 1, 2);
  const std::vector<std::vector<std::string>> expected = {
      {"ZI"},       {"IX"},       {"ZX"},       {"IZ", "ZZ"}, {"XI", "XX"},
      {"XZ", "YY"}, {"YI", "YX"}, {"IY", "ZY"}, {"XY", "YZ"}};
  std::set<std::set<std::string>> expected_classes;
  for (const auto& cls : expected) expected_classes.insert({cls.begin(), cls.end()});

  std::set<std::set<std::string>> found;
  std::set<std::string> covered;
  for (size_t i = 1; i < 16; ++i) {
    const PauliLabel a(2, i & 3, i >> 2);
    const PauliOrbit orb = orbit(cx, a);
    CHECK(orb.period % 1 == 0);
    CHECK(2 % orb.period == 0);  // orbit period divides the gate period
    std::set<std::string> cls;
    for (const auto& m : orb.members) {
      cls.insert(m.str());
      covered.insert(m.str());
    }
    found.insert(cls);
  }
  CHECK(found == expected_classes);
  CHECK(covered.size() == 15);  // the orbits partition the nonidentity labels

  CHECK(orbit(cx, PauliLabel::parse("ZI")).members.size() == 1);
  CHECK(orbit(cx, PauliLabel::identity(2)).period == 1);
}

TEST_CASE("gate period equals the lcm of orbit periods") {
  Rng rng(31, 9);
  for (int rep = 0; rep < 8; ++rep) {
    const uint32_t n = 2;
    const CliffordMap g = random_composed_clifford(n, rng);
    const int d0 = gate_period(g);
    long long lcm = 1;
    for (size_t i = 0; i < 16; ++i) {
      const PauliLabel a(2, i & 3, i >> 2);
      const int p = orbit(g, a).period;
      lcm = std::lcm(lcm, static_cast<long long>(p));
      CHECK(d0 % p == 0);
    }
    CHECK(lcm == d0);
  }
}

TEST_CASE("ecr equals cnot up to single-qubit cliffords") {
  const CliffordMap ecr = CliffordMap::ecr(0, 1, 2);
  CHECK(gate_period(ecr) == 2);
  const CliffordMap cx = CliffordMap::cnot(0, 1, 2);
  bool found = false;
  for (unsigned l0 = 0; l0 < 24 && !found; ++l0)
    for (unsigned l1 = 0; l1 < 24 && !found; ++l1) {
      CliffordMap left = CliffordMap::single_qubit(l0, 0, 2)
                             .compose(CliffordMap::single_qubit(l1, 1, 2))
                             .compose(ecr);
      for (unsigned r0 = 0; r0 < 24 && !found; ++r0)
        for (unsigned r1 = 0; r1 < 24 && !found; ++r1) {
          CliffordMap full = left.compose(
              CliffordMap::single_qubit(r0, 0, 2).compose(CliffordMap::single_qubit(r1, 1, 2)));
          bool same = true;
          for (size_t i = 0; i < 16 && same; ++i) {
            const PauliLabel a(2, i & 3, i >> 2);
            same = full.apply_label(a) == cx.apply_label(a);
          }
          found = same;
        }
    }
  CHECK(found);
}

TEST_CASE("pauli conjugation flips signs on anticommuting generators") {
  const CliffordMap conj_x = CliffordMap::pauli_conjugation(PauliLabel::parse("X"));
  CHECK(conj_x.label_action_is_identity());
  CHECK(conj_x.apply(PauliLabel::parse("Z")) == SignedPauli{PauliLabel::parse("Z"), -1});
  CHECK(conj_x.apply(PauliLabel::parse("X")) == SignedPauli{PauliLabel::parse("X"), +1});
}

TEST_CASE("gate text specs parse") {
  CHECK(CliffordMap::parse("cnot 0 1", 2) == CliffordMap::cnot(0, 1, 2));
  CHECK(CliffordMap::parse("identity", 3) == CliffordMap::identity(3));
  CHECK(CliffordMap::parse("swap 1 2", 3) == CliffordMap::swap(1, 2, 3));
  CHECK_THROWS_AS(CliffordMap::parse("cnot 0 5", 2), ConfigError);
  CHECK_THROWS_AS(CliffordMap::parse("frobnicate 0", 2), ConfigError);
}
