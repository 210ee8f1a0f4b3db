#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "paulilearn/clifford.hpp"
#include "paulilearn/errors.hpp"
#include "paulilearn/pauli.hpp"
#include "paulilearn/rng.hpp"

namespace paulilearn {

inline constexpr uint32_t kDenseCap = 12;
inline constexpr double kProbTol = 1e-9;

/// Dense storage index of a label: qubit j contributes code(j) << 2j, with
/// the per-qubit code order I, X, Z, Y. Internal only; external interfaces
/// always speak Pauli strings.
inline size_t dense_index(const PauliLabel& a) {
  size_t idx = 0;
  for (uint32_t q = 0; q < a.n; ++q) idx |= static_cast<size_t>(a.code(q)) << (2 * q);
  return idx;
}

inline PauliLabel label_from_dense_index(uint32_t n, size_t idx) {
  PauliLabel a(n, 0, 0);
  for (uint32_t q = 0; q < n; ++q) a.set_code(q, static_cast<unsigned>((idx >> (2 * q)) & 3));
  return a;
}

namespace detail {
/// In-place n-fold radix-4 butterfly of v by the matrix (-1)^{<a,b>}.
inline void symplectic_hadamard(std::vector<double>& v, uint32_t n) {
  for (uint32_t q = 0; q < n; ++q) {
    const size_t stride = size_t{1} << (2 * q);
    for (size_t base = 0; base < v.size(); base += 4 * stride) {
      for (size_t off = 0; off < stride; ++off) {
        double* p = v.data() + base + off;
        const double vi = p[0], vx = p[stride], vz = p[2 * stride], vy = p[3 * stride];
        p[0] = vi + vx + vz + vy;
        p[stride] = vi + vx - vz - vy;
        p[2 * stride] = vi - vx + vz - vy;
        p[3 * stride] = vi - vx - vz + vy;
      }
    }
  }
}
}  // namespace detail

/// Walsh-Hadamard transform from Pauli eigenvalues to error rates,
/// p_a = 4^-n sum_b lambda_b (-1)^{<a,b>}. O(n 4^n).
inline std::vector<double> wht_eigen_to_rates(std::vector<double> lambda, uint32_t n) {
  if (n > kDenseCap) throw CapacityError("wht_eigen_to_rates: n exceeds dense cap");
  if (lambda.size() != (size_t{1} << (2 * n)))
    throw DimensionError("wht_eigen_to_rates: vector size is not 4^n");
  detail::symplectic_hadamard(lambda, n);
  const double scale = std::ldexp(1.0, -2 * static_cast<int>(n));
  for (double& v : lambda) v *= scale;
  return lambda;
}

/// Inverse transform, lambda_b = sum_a p_a (-1)^{<a,b>}.
inline std::vector<double> wht_rates_to_eigen(std::vector<double> rates, uint32_t n) {
  if (n > kDenseCap) throw CapacityError("wht_rates_to_eigen: n exceeds dense cap");
  if (rates.size() != (size_t{1} << (2 * n)))
    throw DimensionError("wht_rates_to_eigen: vector size is not 4^n");
  detail::symplectic_hadamard(rates, n);
  return rates;
}

/// A Pauli channel stored by its full eigenvalue vector. Construction
/// validates lambda_0 = 1 and that the dual error rates form a probability
/// distribution; the rate CDF is kept for O(log) sampling.
class DensePauliChannel {
 public:
  DensePauliChannel(uint32_t n, std::vector<double> eigenvalues)
      : n_(n), lambda_(std::move(eigenvalues)) {
    if (n > kDenseCap)
      throw CapacityError("DensePauliChannel: n=" + std::to_string(n) + " exceeds dense cap " +
                          std::to_string(kDenseCap));
    if (lambda_.size() != (size_t{1} << (2 * n)))
      throw DimensionError("DensePauliChannel: eigenvalue vector size is not 4^n");
    if (std::abs(lambda_[0] - 1.0) > kProbTol)
      throw InvalidChannelError("DensePauliChannel: identity eigenvalue must be 1");
    lambda_[0] = 1.0;
    auto rates = wht_eigen_to_rates(lambda_, n_);
    double sum = 0.0;
    for (double p : rates) {
      if (p < -kProbTol)
        throw InvalidChannelError("DensePauliChannel: negative error rate " + std::to_string(p));
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTol * static_cast<double>(rates.size()))
      throw InvalidChannelError("DensePauliChannel: error rates sum to " + std::to_string(sum));
    sampler_ = DiscreteSampler(rates);
  }

  static DensePauliChannel from_rates(uint32_t n, const std::vector<double>& rates) {
    return DensePauliChannel(n, wht_rates_to_eigen(rates, n));
  }

  uint32_t n() const { return n_; }
  const std::vector<double>& eigenvalues() const { return lambda_; }
  std::vector<double> rates() const { return wht_eigen_to_rates(lambda_, n_); }

  double eigenvalue(const PauliLabel& a) const { return lambda_[dense_index(a)]; }

  PauliLabel sample(Rng& rng) const { return label_from_dense_index(n_, sampler_(rng)); }

 private:
  uint32_t n_;
  std::vector<double> lambda_;
  DiscreteSampler sampler_;
};

class Channel;

namespace ch {

struct Depolarizing {
  uint32_t n;
};

/// lambda_0 = 1, lambda_k = sign * eps, all other eigenvalues 0.
struct Spiked {
  PauliLabel k;
  int sign;
  double eps;
  PauliLabel coset_rep;  // any label anticommuting with k
};

/// Eigenvalue depends only on the pattern, via an explicit 2^n table.
struct PatternExplicit {
  uint32_t n;
  std::vector<double> fidelity;    // indexed by pattern bits
  std::vector<double> class_prob;  // probability of drawing each pattern class
  DiscreteSampler pattern_sampler;
};

/// Product form: fidelity[s] = prod_j c_j^{s_j}; usable at any n.
struct PatternProduct {
  std::vector<double> c;
};

struct Dense {
  std::shared_ptr<const DensePauliChannel> ch;
};

struct Tensor {
  uint32_t n;
  std::vector<Channel> factors;
  std::vector<uint32_t> offsets;
};

struct Composed {
  std::vector<Channel> parts;  // same n; eigenvalues multiply, errors add
};

}  // namespace ch

/// A Pauli channel in one of several structured forms. Eigenvalue queries
/// and error sampling are O(poly n) for every non-dense variant.
class Channel {
 public:
  using Rep = std::variant<ch::Depolarizing, ch::Spiked, ch::PatternExplicit, ch::PatternProduct,
                           ch::Dense, ch::Tensor, ch::Composed>;

  static Channel identity(uint32_t n) {
    return pattern_product(std::vector<double>(n, 1.0));
  }

  static Channel depolarizing(uint32_t n) {
    PauliLabel::check_capacity(n);
    return Channel(ch::Depolarizing{n}, n);
  }

  static Channel spiked(const PauliLabel& k, int sign, double eps) {
    if (k.is_identity()) throw DomainError("Spiked channel: k must be nonidentity");
    if (sign != +1 && sign != -1) throw DomainError("Spiked channel: sign must be +-1");
    if (eps < 0.0 || eps > 0.5)
      throw InvalidChannelError("Spiked channel: eps must lie in [0, 1/2], got " + std::to_string(eps));
    // Anticommuting coset representative: a single-qubit Pauli that
    // anticommutes with k on its first nontrivial qubit.
    const uint32_t q = static_cast<uint32_t>(std::countr_zero(pattern(k)));
    PauliLabel c(k.n, 0, 0);
    c.set_code(q, k.code(q) == 1 ? 2u : 1u);  // X -> Z, otherwise X
    return Channel(ch::Spiked{k, sign, eps, c}, k.n);
  }

  static Channel pattern_explicit(uint32_t n, std::vector<double> fidelity) {
    if (n > 20) throw CapacityError("pattern_explicit: n too large for an explicit 2^n table");
    if (fidelity.size() != (size_t{1} << n))
      throw DimensionError("pattern_explicit: fidelity table size is not 2^n");
    if (std::abs(fidelity[0] - 1.0) > kProbTol)
      throw InvalidChannelError("pattern_explicit: fidelity of the empty pattern must be 1");
    fidelity[0] = 1.0;
    // Per-qubit kernel (t=0 -> 1; t=1 -> 3 if the qubit is trivial in the
    // class, -1 otherwise) turns eigenvalues-by-pattern into class
    // probabilities.
    std::vector<double> r = fidelity;
    for (uint32_t q = 0; q < n; ++q) {
      const size_t stride = size_t{1} << q;
      for (size_t base = 0; base < r.size(); base += 2 * stride) {
        for (size_t off = 0; off < stride; ++off) {
          const double g0 = r[base + off], g1 = r[base + off + stride];
          r[base + off] = g0 + 3.0 * g1;
          r[base + off + stride] = g0 - g1;
        }
      }
    }
    const double scale = std::ldexp(1.0, -2 * static_cast<int>(n));
    double sum = 0.0;
    for (size_t s = 0; s < r.size(); ++s) {
      r[s] *= scale * std::pow(3.0, std::popcount(s));
      if (r[s] < -kProbTol)
        throw InvalidChannelError("pattern_explicit: negative class probability");
      sum += r[s];
    }
    if (std::abs(sum - 1.0) > kProbTol * static_cast<double>(r.size()))
      throw InvalidChannelError("pattern_explicit: class probabilities sum to " + std::to_string(sum));
    ch::PatternExplicit rep{n, std::move(fidelity), r, DiscreteSampler(r)};
    return Channel(std::move(rep), n);
  }

  static Channel pattern_product(std::vector<double> per_qubit) {
    PauliLabel::check_capacity(static_cast<uint32_t>(per_qubit.size()));
    for (double c : per_qubit)
      if (c < -1.0 / 3.0 - kProbTol || c > 1.0 + kProbTol)
        throw InvalidChannelError("pattern_product: per-qubit fidelity outside [-1/3, 1]");
    const uint32_t n = static_cast<uint32_t>(per_qubit.size());
    return Channel(ch::PatternProduct{std::move(per_qubit)}, n);
  }

  static Channel dense(DensePauliChannel c) {
    const uint32_t n = c.n();
    return Channel(ch::Dense{std::make_shared<const DensePauliChannel>(std::move(c))}, n);
  }

  static Channel tensor(std::vector<Channel> factors) {
    if (factors.empty()) throw DimensionError("tensor: no factors");
    ch::Tensor rep;
    rep.n = 0;
    for (auto& f : factors) {
      rep.offsets.push_back(rep.n);
      rep.n += f.n();
    }
    PauliLabel::check_capacity(rep.n);
    rep.factors = std::move(factors);
    const uint32_t n = rep.n;
    return Channel(std::move(rep), n);
  }

  static Channel compose(Channel a, Channel b) {
    if (a.n() != b.n()) throw DimensionError("compose: channel sizes differ");
    const uint32_t n = a.n();
    // Flatten nested compositions so the eigenvalue product is evaluated in
    // one canonical order regardless of association.
    ch::Composed rep;
    auto absorb = [&rep](Channel&& c) {
      if (const auto* nested = std::get_if<ch::Composed>(&c.rep())) {
        for (const auto& p : nested->parts) rep.parts.push_back(p);
      } else {
        rep.parts.push_back(std::move(c));
      }
    };
    absorb(std::move(a));
    absorb(std::move(b));
    return Channel(std::move(rep), n);
  }

  uint32_t n() const { return n_; }
  const Rep& rep() const { return *rep_; }

  /// Pauli eigenvalue (fidelity) at label a.
  double eigenvalue(const PauliLabel& a) const {
    if (a.n != n_) throw DimensionError("Channel.eigenvalue: label has wrong qubit count");
    return std::visit(
        [&](const auto& r) -> double { return eig(r, a); }, *rep_);
  }

  /// Draw an error label from the channel's Pauli error-rate distribution.
  PauliLabel sample_error(Rng& rng) const {
    return std::visit([&](const auto& r) -> PauliLabel { return draw(r, rng); }, *rep_);
  }

  /// Dense expansion for oracles and validation; n <= dense cap.
  DensePauliChannel expand_dense() const {
    if (n_ > kDenseCap) throw CapacityError("expand_dense: n exceeds dense cap");
    std::vector<double> lambda(size_t{1} << (2 * n_));
    for (size_t i = 0; i < lambda.size(); ++i)
      lambda[i] = eigenvalue(label_from_dense_index(n_, i));
    return DensePauliChannel(n_, std::move(lambda));
  }

 private:
  Channel(Rep rep, uint32_t n) : rep_(std::make_shared<const Rep>(std::move(rep))), n_(n) {}

  // ---- eigenvalue dispatch ----
  static double eig(const ch::Depolarizing&, const PauliLabel& a) {
    return a.is_identity() ? 1.0 : 0.0;
  }
  static double eig(const ch::Spiked& s, const PauliLabel& a) {
    if (a.is_identity()) return 1.0;
    if (a == s.k) return s.sign * s.eps;
    return 0.0;
  }
  static double eig(const ch::PatternExplicit& p, const PauliLabel& a) {
    return p.fidelity[pattern(a)];
  }
  static double eig(const ch::PatternProduct& p, const PauliLabel& a) {
    double f = 1.0;
    for (uint64_t bits = pattern(a); bits; bits &= bits - 1)
      f *= p.c[static_cast<uint32_t>(std::countr_zero(bits))];
    return f;
  }
  static double eig(const ch::Dense& d, const PauliLabel& a) { return d.ch->eigenvalue(a); }
  static double eig(const ch::Tensor& t, const PauliLabel& a) {
    double f = 1.0;
    for (size_t i = 0; i < t.factors.size(); ++i)
      f *= t.factors[i].eigenvalue(a.slice(t.offsets[i], t.factors[i].n()));
    return f;
  }
  static double eig(const ch::Composed& c, const PauliLabel& a) {
    double f = 1.0;
    for (const auto& part : c.parts) f *= part.eigenvalue(a);
    return f;
  }

  // ---- sampling dispatch ----
  static PauliLabel draw(const ch::Depolarizing& d, Rng& rng) {
    return PauliLabel::random(d.n, rng);
  }
  static PauliLabel draw(const ch::Spiked& s, Rng& rng) {
    PauliLabel u = PauliLabel::random(s.k.n, rng);
    if (rng.bernoulli(s.eps)) {
      const unsigned want = s.sign > 0 ? 0u : 1u;
      if (symplectic_inner(u, s.k) != want) u ^= s.coset_rep;
    }
    return u;
  }
  static PauliLabel draw(const ch::PatternExplicit& p, Rng& rng) {
    const uint64_t pat = p.pattern_sampler(rng);
    PauliLabel a(p.n, 0, 0);
    for (uint64_t bits = pat; bits; bits &= bits - 1)
      a.set_code(static_cast<uint32_t>(std::countr_zero(bits)), 1 + static_cast<unsigned>(rng.bounded(3)));
    return a;
  }
  static PauliLabel draw(const ch::PatternProduct& p, Rng& rng) {
    PauliLabel a(static_cast<uint32_t>(p.c.size()), 0, 0);
    for (uint32_t q = 0; q < a.n; ++q) {
      const double perr = (1.0 - p.c[q]) * 0.75;  // 3 * (1-c)/4
      if (perr > 0.0 && rng.bernoulli(perr)) a.set_code(q, 1 + static_cast<unsigned>(rng.bounded(3)));
    }
    return a;
  }
  static PauliLabel draw(const ch::Dense& d, Rng& rng) { return d.ch->sample(rng); }
  static PauliLabel draw(const ch::Tensor& t, Rng& rng) {
    PauliLabel a(t.n, 0, 0);
    for (size_t i = 0; i < t.factors.size(); ++i) {
      const PauliLabel e = t.factors[i].sample_error(rng);
      a.x |= e.x << t.offsets[i];
      a.z |= e.z << t.offsets[i];
    }
    return a;
  }
  static PauliLabel draw(const ch::Composed& c, Rng& rng) {
    PauliLabel a = c.parts[0].sample_error(rng);
    for (size_t i = 1; i < c.parts.size(); ++i) a ^= c.parts[i].sample_error(rng);
    return a;
  }

  std::shared_ptr<const Rep> rep_;
  uint32_t n_;
};

/// Local-Clifford twirl of a dense channel: the resulting eigenvalue at a
/// is the mean of lambda over the 3^|pt(a)| labels sharing a's pattern.
inline Channel clifford_twirl_pattern(const DensePauliChannel& c) {
  const uint32_t n = c.n();
  std::vector<double> sum(size_t{1} << n, 0.0), cnt(size_t{1} << n, 0.0);
  const size_t total = size_t{1} << (2 * n);
  for (size_t i = 0; i < total; ++i) {
    const PauliLabel a = label_from_dense_index(n, i);
    sum[pattern(a)] += c.eigenvalues()[i];
    cnt[pattern(a)] += 1.0;
  }
  for (size_t s = 0; s < sum.size(); ++s) sum[s] /= cnt[s];
  return Channel::pattern_explicit(n, std::move(sum));
}

/// State-preparation and measurement noise as a pair of Pauli channels.
/// For Bell-frame SPAM these act on 2n qubits (system first, then ancilla)
/// and the combined diagonal fidelity xi_{a,a} multiplies prep and
/// measurement eigenvalues at the joint label (a, a).
struct SPAMModel {
  Channel state_prep;
  Channel measurement;

  static SPAMModel noiseless(uint32_t n) {
    return SPAMModel{Channel::identity(n), Channel::identity(n)};
  }

  uint32_t n() const { return state_prep.n(); }

  double xi(const PauliLabel& a) const {
    return state_prep.eigenvalue(a) * measurement.eigenvalue(a);
  }
};

/// Joint label on system qubits [0,n) and ancilla qubits [n,2n).
inline PauliLabel joint_label(const PauliLabel& sys, const PauliLabel& anc) {
  sys.require_same_n(anc);
  const uint32_t n = sys.n;
  PauliLabel::check_capacity(2 * n);
  return PauliLabel(2 * n, sys.x | (anc.x << n), sys.z | (anc.z << n));
}

/// Diagonal Bell-frame fidelity xi_{a,a} of a 2n-qubit SPAM model.
inline double xi_diag(const SPAMModel& spam, const PauliLabel& a) {
  return spam.xi(joint_label(a, a));
}

}  // namespace paulilearn
