#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "paulilearn/channel.hpp"

using namespace paulilearn;

namespace {

// Brute-force transform oracle: p_a = 4^-n sum_b lambda_b (-1)^{<a,b>}.
std::vector<double> brute_force_rates(const std::vector<double>& lambda, uint32_t n) {
  const size_t total = size_t{1} << (2 * n);
  std::vector<double> p(total, 0.0);
  for (size_t ia = 0; ia < total; ++ia) {
    const PauliLabel a = label_from_dense_index(n, ia);
    double acc = 0.0;
    for (size_t ib = 0; ib < total; ++ib) {
      const PauliLabel b = label_from_dense_index(n, ib);
      acc += symplectic_inner(a, b) ? -lambda[ib] : lambda[ib];
    }
    p[ia] = acc / static_cast<double>(total);
  }
  return p;
}

std::vector<double> random_valid_eigenvalues(uint32_t n, Rng& rng, double err_mass = 0.2) {
  const size_t total = size_t{1} << (2 * n);
  std::vector<double> rates(total, 0.0);
  double sum = 0.0;
  for (size_t i = 1; i < total; ++i) {
    rates[i] = rng.uniform();
    sum += rates[i];
  }
  for (size_t i = 1; i < total; ++i) rates[i] *= err_mass / sum;
  rates[0] = 1.0 - err_mass;
  return wht_rates_to_eigen(rates, n);
}

double set_code_at(std::vector<double>& lambda, uint32_t n, const std::string& label, double v) {
  lambda[dense_index(PauliLabel::parse(label))] = v;
  (void)n;
  return v;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / 2.0;
}

}  // namespace

TEST_CASE("wht on single-qubit examples") {
  // depolarizing: lambda = (1,0,0,0) in (I,X,Y,Z) order
  std::vector<double> lam(4, 0.0);
  set_code_at(lam, 1, "I", 1.0);
  auto p = wht_eigen_to_rates(lam, 1);
  for (double v : p) CHECK(v == Catch::Approx(0.25));

  std::vector<double> lam2(4, 0.0);
  set_code_at(lam2, 1, "I", 1.0);
  set_code_at(lam2, 1, "Z", 1.0 / 3.0);
  auto p2 = wht_eigen_to_rates(lam2, 1);
  CHECK(p2[dense_index(PauliLabel::parse("I"))] == Catch::Approx(1.0 / 3.0));
  CHECK(p2[dense_index(PauliLabel::parse("X"))] == Catch::Approx(1.0 / 6.0));
  CHECK(p2[dense_index(PauliLabel::parse("Y"))] == Catch::Approx(1.0 / 6.0));
  CHECK(p2[dense_index(PauliLabel::parse("Z"))] == Catch::Approx(1.0 / 3.0));

  // inverse direction: identity channel
  std::vector<double> point(4, 0.0);
  point[0] = 1.0;
  auto lam3 = wht_rates_to_eigen(point, 1);
  for (double v : lam3) CHECK(v == Catch::Approx(1.0));
}

TEST_CASE("wht butterfly matches the brute-force oracle") {
  Rng rng(41, 0);
  for (uint32_t n = 1; n <= 3; ++n) {
    const auto lambda = random_valid_eigenvalues(n, rng);
    const auto fast = wht_eigen_to_rates(lambda, n);
    const auto brute = brute_force_rates(lambda, n);
    for (size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == Catch::Approx(brute[i]).margin(1e-12));
  }
}

TEST_CASE("wht round trip is the identity") {
  Rng rng(42, 0);
  for (uint32_t n = 1; n <= 6; ++n) {
    const auto lambda = random_valid_eigenvalues(n, rng);
    const auto back = wht_rates_to_eigen(wht_eigen_to_rates(lambda, n), n);
    double max_err = 0.0;
    for (size_t i = 0; i < lambda.size(); ++i)
      max_err = std::max(max_err, std::abs(back[i] - lambda[i]));
    CHECK(max_err < 1e-12);
  }
  CHECK_THROWS_AS(wht_eigen_to_rates(std::vector<double>(4, 1.0), 2), DimensionError);
}

TEST_CASE("structured eigenvalue queries") {
  const Channel spiked = Channel::spiked(PauliLabel::parse("XX"), +1, 1.0 / 3.0);
  CHECK(spiked.eigenvalue(PauliLabel::parse("XX")) == Catch::Approx(1.0 / 3.0));
  CHECK(spiked.eigenvalue(PauliLabel::parse("II")) == 1.0);
  CHECK(spiked.eigenvalue(PauliLabel::parse("ZZ")) == 0.0);

  const Channel dep = Channel::depolarizing(2);
  CHECK(dep.eigenvalue(PauliLabel::identity(2)) == 1.0);
  CHECK(dep.eigenvalue(PauliLabel::parse("XI")) == 0.0);

  const Channel single = Channel::pattern_explicit(1, {1.0, 0.9});
  const Channel two = Channel::tensor({single, single});
  CHECK(two.eigenvalue(PauliLabel::parse("ZZ")) == Catch::Approx(0.81));
  CHECK(two.eigenvalue(PauliLabel::parse("ZI")) == Catch::Approx(0.9));

  CHECK_THROWS_AS(Channel::spiked(PauliLabel::parse("Z"), +1, 0.7), InvalidChannelError);
  CHECK_THROWS_AS(Channel::spiked(PauliLabel::identity(2), +1, 0.3), DomainError);
  CHECK_THROWS_AS(Channel::pattern_explicit(1, {0.9, 0.9}), InvalidChannelError);
}

TEST_CASE("every structured form expands to a valid channel") {
  Rng rng(4711, 0);
  std::vector<Channel> channels;
  channels.push_back(Channel::depolarizing(2));
  channels.push_back(Channel::spiked(PauliLabel::parse("XYZ"), -1, 0.4));
  channels.push_back(Channel::pattern_explicit(2, {1.0, 0.93, 0.96, 0.91}));
  channels.push_back(Channel::pattern_product({0.99, 0.95, 0.9}));
  channels.push_back(Channel::dense(DensePauliChannel(2, random_valid_eigenvalues(2, rng))));
  channels.push_back(Channel::tensor({Channel::pattern_product({0.9}), Channel::depolarizing(1),
                                      Channel::spiked(PauliLabel::parse("Y"), +1, 0.25)}));
  channels.push_back(Channel::compose(Channel::pattern_product({0.95, 0.97}),
                                      Channel::spiked(PauliLabel::parse("ZZ"), +1, 0.3)));
  for (const auto& c : channels) {
    const DensePauliChannel dense = c.expand_dense();
    const auto rates = dense.rates();
    double sum = 0.0;
    for (double p : rates) {
      CHECK(p >= -1e-12);
      sum += p;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("sampling matches the rate distribution") {
  Rng rng(77, 3);
  const long shots = 1000000;

  SECTION("depolarizing n=1 is uniform") {
    const Channel c = Channel::depolarizing(1);
    std::array<long, 4> counts{};
    for (long s = 0; s < shots; ++s) counts[dense_index(c.sample_error(rng))] += 1;
    double chi2 = 0.0;
    const double expect = shots / 4.0;
    for (long cnt : counts) chi2 += (cnt - expect) * (cnt - expect) / expect;
    CHECK(chi2 < 16.266);  // chi-square 0.999 quantile at 3 dof
  }

  SECTION("spiked and tensor empirical distributions track the wht oracle") {
    std::vector<Channel> channels;
    channels.push_back(Channel::spiked(PauliLabel::parse("Z"), +1, 1.0 / 3.0));
    channels.push_back(Channel::spiked(PauliLabel::parse("XY"), -1, 0.3));
    channels.push_back(Channel::tensor({Channel::pattern_explicit(1, {1.0, 0.8}),
                                        Channel::pattern_product({0.9})}));
    channels.push_back(Channel::compose(Channel::pattern_product({0.92, 0.9}),
                                        Channel::spiked(PauliLabel::parse("ZX"), +1, 0.2)));
    for (const auto& c : channels) {
      const auto rates = c.expand_dense().rates();
      std::vector<double> freq(rates.size(), 0.0);
      for (long s = 0; s < shots; ++s) freq[dense_index(c.sample_error(rng))] += 1.0;
      for (double& f : freq) f /= shots;
      const double bound = 5.0 * std::sqrt(static_cast<double>(rates.size()) / shots);
      CHECK(total_variation(freq, rates) < bound);
    }
  }

  SECTION("spiked n=1 hits the derived rates (1/3, 1/6, 1/6, 1/3)") {
    const Channel c = Channel::spiked(PauliLabel::parse("Z"), +1, 1.0 / 3.0);
    const auto rates = c.expand_dense().rates();
    CHECK(rates[dense_index(PauliLabel::parse("I"))] == Catch::Approx(1.0 / 3.0));
    CHECK(rates[dense_index(PauliLabel::parse("X"))] == Catch::Approx(1.0 / 6.0));
    CHECK(rates[dense_index(PauliLabel::parse("Y"))] == Catch::Approx(1.0 / 6.0));
    CHECK(rates[dense_index(PauliLabel::parse("Z"))] == Catch::Approx(1.0 / 3.0));
  }

  SECTION("tensor marginals match factor rates") {
    const Channel left = Channel::pattern_explicit(1, {1.0, 0.7});
    const Channel right = Channel::spiked(PauliLabel::parse("Z"), +1, 0.3);
    const Channel both = Channel::tensor({left, right});
    const auto left_rates = left.expand_dense().rates();
    const auto right_rates = right.expand_dense().rates();
    std::vector<double> lfreq(4, 0.0), rfreq(4, 0.0);
    const long n_draw = 200000;
    for (long s = 0; s < n_draw; ++s) {
      const PauliLabel e = both.sample_error(rng);
      lfreq[dense_index(e.slice(0, 1))] += 1.0;
      rfreq[dense_index(e.slice(1, 1))] += 1.0;
    }
    for (int i = 0; i < 4; ++i) {
      CHECK(lfreq[i] / n_draw == Catch::Approx(left_rates[i]).margin(0.005));
      CHECK(rfreq[i] / n_draw == Catch::Approx(right_rates[i]).margin(0.005));
    }
  }
}

TEST_CASE("composition semantics") {
  Rng rng(5, 5);
  const Channel a = Channel::dense(DensePauliChannel(1, random_valid_eigenvalues(1, rng)));
  const Channel b = Channel::dense(DensePauliChannel(1, random_valid_eigenvalues(1, rng)));
  const Channel c = Channel::dense(DensePauliChannel(1, random_valid_eigenvalues(1, rng)));

  for (size_t i = 0; i < 4; ++i) {
    const PauliLabel q = label_from_dense_index(1, i);
    CHECK(Channel::compose(a, b).eigenvalue(q) == Channel::compose(b, a).eigenvalue(q));
    CHECK(Channel::compose(Channel::compose(a, b), c).eigenvalue(q) ==
          Channel::compose(a, Channel::compose(b, c)).eigenvalue(q));
    CHECK(Channel::compose(Channel::depolarizing(1), a).eigenvalue(q) ==
          Channel::depolarizing(1).eigenvalue(q));
    CHECK(Channel::compose(a, Channel::identity(1)).eigenvalue(q) == a.eigenvalue(q));
  }
  CHECK_THROWS_AS(Channel::compose(a, Channel::identity(2)), DimensionError);

  // tensor eigenvalue factorization against the dense brute force
  const Channel t = Channel::tensor({a, b});
  const DensePauliChannel dense_t = t.expand_dense();
  for (int rep = 0; rep < 40; ++rep) {
    const PauliLabel q = PauliLabel::random(2, rng);
    CHECK(dense_t.eigenvalue(q) ==
          Catch::Approx(a.eigenvalue(q.slice(0, 1)) * b.eigenvalue(q.slice(1, 1))));
  }
}

TEST_CASE("local clifford twirl to a pattern channel") {
  Rng rng(1234, 8);

  SECTION("n=1 twirl averages the three directions") {
    std::vector<double> lam(4);
    lam[dense_index(PauliLabel::parse("I"))] = 1.0;
    const double lx = 0.95, ly = 0.9, lz = 0.88;
    lam[dense_index(PauliLabel::parse("X"))] = lx;
    lam[dense_index(PauliLabel::parse("Y"))] = ly;
    lam[dense_index(PauliLabel::parse("Z"))] = lz;
    const Channel t = clifford_twirl_pattern(DensePauliChannel(1, lam));
    CHECK(t.eigenvalue(PauliLabel::parse("X")) == Catch::Approx((lx + ly + lz) / 3.0));

    // independent oracle: average the channel over all 24 single-qubit
    // Clifford conjugations
    double brute = 0.0;
    for (unsigned i = 0; i < 24; ++i) {
      const CliffordMap c = CliffordMap::single_qubit(i, 0, 1);
      brute += lam[dense_index(c.apply_label(PauliLabel::parse("X")))];
    }
    CHECK(t.eigenvalue(PauliLabel::parse("X")) == Catch::Approx(brute / 24.0));
  }

  SECTION("depolarizing is fixed and twirling is idempotent") {
    const auto dep = Channel::depolarizing(2).expand_dense();
    const Channel t = clifford_twirl_pattern(dep);
    CHECK(t.eigenvalue(PauliLabel::parse("XY")) == 0.0);
    CHECK(t.eigenvalue(PauliLabel::parse("XI")) == 0.0);

    const auto arbitrary = DensePauliChannel(2, random_valid_eigenvalues(2, rng));
    const Channel once = clifford_twirl_pattern(arbitrary);
    const Channel twice = clifford_twirl_pattern(once.expand_dense());
    for (size_t i = 0; i < 16; ++i) {
      const PauliLabel q = label_from_dense_index(2, i);
      CHECK(once.eigenvalue(q) == Catch::Approx(twice.eigenvalue(q)).margin(1e-12));
    }
  }
}

TEST_CASE("spam model diagonal fidelities") {
  const SPAMModel spam{Channel::pattern_product({0.99, 0.98, 0.99, 0.98}),
                       Channel::pattern_product({0.97, 0.97, 0.97, 0.97})};
  CHECK(xi_diag(spam, PauliLabel::identity(2)) == 1.0);
  const PauliLabel a = PauliLabel::parse("XI");
  const PauliLabel joint = joint_label(a, a);
  CHECK(joint.n == 4);
  CHECK(joint.str() == "XIXI");
  CHECK(xi_diag(spam, a) ==
        Catch::Approx(spam.state_prep.eigenvalue(joint) * spam.measurement.eigenvalue(joint)));
  CHECK(SPAMModel::noiseless(3).xi(PauliLabel::parse("XYZ")) == 1.0);
}

TEST_CASE("invalid dense channels are rejected") {
  std::vector<double> lam(4, 1.0);
  lam[dense_index(PauliLabel::parse("Z"))] = -1.5;
  CHECK_THROWS_AS(DensePauliChannel(1, lam), InvalidChannelError);
  std::vector<double> lam2(4, 0.5);
  CHECK_THROWS_AS(DensePauliChannel(1, lam2), InvalidChannelError);  // lambda_0 != 1
  CHECK_THROWS_AS(DensePauliChannel(13, std::vector<double>(16, 1.0)), CapacityError);
}
