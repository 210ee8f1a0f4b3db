#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "paulilearn/channel.hpp"
#include "paulilearn/clifford.hpp"
#include "paulilearn/errors.hpp"
#include "paulilearn/pauli.hpp"
#include "paulilearn/rng.hpp"

namespace paulilearn {

enum class Protocol { eel, aux_efl, efl };

inline const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::eel: return "eel";
    case Protocol::aux_efl: return "aux_efl";
    default: return "efl";
  }
}

/// One randomized circuit of the learning protocols: d layers of the gate
/// interleaved with Pauli twirls on the system and single-qubit Clifford
/// twirls on the ancilla, measurement twirls alpha/beta, and the closing
/// gates that undo the twirling frame.
struct GateSequence {
  int d = 0;
  uint32_t n = 0;
  std::vector<PauliLabel> pauli_twirls;               // a_1 .. a_d
  std::vector<std::vector<unsigned>> clifford_twirls; // d layers of 24-indices
  PauliLabel alpha, beta;
  PauliLabel end_pauli;      // label of P_end = P_beta G^d(P_{a_1}) ... G(P_{a_d})
  CliffordMap end_clifford;  // P_alpha C_1^-1 ... C_d^-1

  GateSequence() : end_clifford(0) {}
};

inline GateSequence sample_gate_sequence(int d, const CliffordMap& gate, uint32_t n, Rng& rng) {
  if (d < 0) throw DomainError("sample_gate_sequence: negative depth");
  if (gate.n() != n) throw DimensionError("sample_gate_sequence: gate size mismatch");
  GateSequence seq;
  seq.d = d;
  seq.n = n;
  seq.alpha = PauliLabel::random(n, rng);
  seq.beta = PauliLabel::random(n, rng);
  seq.pauli_twirls.reserve(d);
  seq.clifford_twirls.reserve(d);
  for (int j = 0; j < d; ++j) {
    std::vector<unsigned> layer(n);
    for (uint32_t q = 0; q < n; ++q) layer[q] = static_cast<unsigned>(rng.bounded(24));
    seq.clifford_twirls.push_back(std::move(layer));
    seq.pauli_twirls.push_back(PauliLabel::random(n, rng));
  }
  // P_end = P_beta G^d(a_1) G^{d-1}(a_2) ... G(a_d), labels only.
  seq.end_pauli = seq.beta;
  for (int j = 0; j < d; ++j) {
    PauliLabel img = seq.pauli_twirls[j];
    for (int k = 0; k < d - j; ++k) img = gate.apply_label(img);
    seq.end_pauli ^= img;
  }
  // C_end = P_alpha C_1^-1 C_2^-1 ... C_d^-1 (rightmost applied first).
  CliffordMap cend = CliffordMap::pauli_conjugation(seq.alpha);
  for (int j = 0; j < d; ++j)
    cend = cend.compose(CliffordMap::single_qubit_layer(seq.clifford_twirls[j]).inverse());
  seq.end_clifford = std::move(cend);
  return seq;
}

/// Full description of one learning experiment.
struct ExperimentPlan {
  Protocol protocol = Protocol::eel;
  uint32_t n = 0;
  CliffordMap gate;
  std::vector<int> depths;
  int n_circuits = 1;
  int n_shots = 1;
  Channel system_noise;
  Channel ancilla_noise;
  SPAMModel spam;  // 2n qubits for EEL, n otherwise
  std::optional<Channel> crosstalk;  // joint 2n-qubit layer noise
  PauliLabel basis;  // EFL only: full-weight Pauli naming the product basis
  uint64_t seed = 0;

  ExperimentPlan()
      : gate(0),
        system_noise(Channel::identity(0)),
        ancilla_noise(Channel::identity(0)),
        spam(SPAMModel::noiseless(0)) {}

  int gate_period_cached() const {
    if (period_ < 0) period_ = gate_period(gate);
    return period_;
  }

  void validate() const {
    if (n == 0) throw DimensionError("plan: n must be positive");
    if (gate.n() != n) throw DimensionError("plan: gate acts on wrong qubit count");
    if (system_noise.n() != n) throw DimensionError("plan: system noise has wrong qubit count");
    if (ancilla_noise.n() != n) throw DimensionError("plan: ancilla noise has wrong qubit count");
    const uint32_t spam_n = protocol == Protocol::eel ? 2 * n : n;
    if (spam.state_prep.n() != spam_n || spam.measurement.n() != spam_n)
      throw DimensionError("plan: SPAM channels must act on " + std::to_string(spam_n) + " qubits");
    if (crosstalk && crosstalk->n() != 2 * n)
      throw DimensionError("plan: crosstalk channel must act on 2n qubits");
    if (n_circuits < 1 || n_shots < 1) throw DomainError("plan: circuit/shot counts must be >= 1");
    const int d0 = gate_period_cached();
    for (int d : depths) {
      if (d < 0) throw DomainError("plan: negative depth");
      if (d % d0 != 0)
        throw DomainError("plan: depth " + std::to_string(d) + " is not a multiple of the gate period " +
                          std::to_string(d0));
    }
    if (protocol == Protocol::efl) {
      if (basis.n != n || pattern(basis) != basis.mask())
        throw DomainError("plan: EFL requires a full-weight basis Pauli");
    }
  }

 private:
  mutable int period_ = -1;
};

/// One measured shot. For EEL the outcome is the twirl-corrected Bell label
/// mu; for AuxEFL the corrected bit vector k and for EFL the measurement
/// flip vector, both stored in the x half.
struct ShotRecord {
  int depth = 0;
  int circuit = 0;
  int shot = 0;
  PauliLabel outcome;
};

struct CollectOptions {
  bool twirling = true;
  int workers = 1;
};

namespace detail {

inline constexpr uint64_t kSequenceTag = ~0ULL;

/// Precompiled label action of the plan gate.
struct GateAction {
  uint32_t n = 0;
  bool ident = true;
  bool use_table = false;
  uint64_t mask = 0;
  std::vector<uint32_t> table;
  std::vector<uint64_t> gx_x, gx_z, gz_x, gz_z;

  static GateAction build(const CliffordMap& g) {
    GateAction a;
    a.n = g.n();
    a.mask = a.n >= 64 ? ~0ULL : ((1ULL << a.n) - 1);
    a.ident = g.label_action_is_identity();
    if (a.ident) return a;
    if (a.n <= 8) {
      a.use_table = true;
      a.table.resize(size_t{1} << (2 * a.n));
      for (size_t idx = 0; idx < a.table.size(); ++idx) {
        const PauliLabel in(a.n, idx & a.mask, idx >> a.n);
        const PauliLabel out = g.apply_label(in);
        a.table[idx] = static_cast<uint32_t>(out.x | (out.z << a.n));
      }
    } else {
      a.gx_x.resize(a.n);
      a.gx_z.resize(a.n);
      a.gz_x.resize(a.n);
      a.gz_z.resize(a.n);
      for (uint32_t q = 0; q < a.n; ++q) {
        a.gx_x[q] = g.image_of_x(q).label.x;
        a.gx_z[q] = g.image_of_x(q).label.z;
        a.gz_x[q] = g.image_of_z(q).label.x;
        a.gz_z[q] = g.image_of_z(q).label.z;
      }
    }
    return a;
  }

  void apply(uint64_t& x, uint64_t& z) const {
    if (ident) return;
    if (use_table) {
      const uint32_t out = table[x | (z << n)];
      x = out & mask;
      z = out >> n;
      return;
    }
    uint64_t ox = 0, oz = 0;
    for (uint64_t bits = x; bits; bits &= bits - 1) {
      const int q = std::countr_zero(bits);
      ox ^= gx_x[q];
      oz ^= gx_z[q];
    }
    for (uint64_t bits = z; bits; bits &= bits - 1) {
      const int q = std::countr_zero(bits);
      oz ^= gz_z[q];
      ox ^= gz_x[q];
    }
    x = ox;
    z = oz;
  }
};

/// Net propagation permutations of the ancilla twirl frame: row j holds, per
/// qubit, the label action of conjugation by C_1^-1 ... C_j^-1, which is what
/// a noise label drawn after layer j experiences by the end of the circuit.
struct AncillaPropagation {
  uint32_t n = 0;
  std::vector<PauliPermutation> rows;  // d rows of n entries

  const PauliPermutation* row(int j) const { return rows.data() + static_cast<size_t>(j) * n; }

  static void apply_row(const PauliPermutation* perms, uint64_t& x, uint64_t& z) {
    uint64_t ox = x, oz = z;
    for (uint64_t bits = x | z; bits; bits &= bits - 1) {
      const int q = std::countr_zero(bits);
      const unsigned c = ((x >> q) & 1) | (((z >> q) & 1) << 1);
      const unsigned cc = perms[q](c);
      ox = (ox & ~(1ULL << q)) | (static_cast<uint64_t>(cc & 1) << q);
      oz = (oz & ~(1ULL << q)) | (static_cast<uint64_t>((cc >> 1) & 1) << q);
    }
    x = ox;
    z = oz;
  }
};

/// Circuit-level randomness in the compact form used by the shot loop.
/// Reused across circuits to keep the collect loop allocation-free.
struct CircuitDraw {
  PauliLabel alpha, beta;
  AncillaPropagation prop;
  std::vector<PauliPermutation> cur;

  void fill(const ExperimentPlan& plan, int d, int circuit, bool twirling) {
    Rng rng(plan.seed, static_cast<uint64_t>(d), static_cast<uint64_t>(circuit), kSequenceTag);
    const uint32_t n = plan.n;
    prop.n = n;
    prop.rows.assign(static_cast<size_t>(d) * n, PauliPermutation{});
    if (!twirling) {
      alpha = PauliLabel::identity(n);
      beta = PauliLabel::identity(n);
      return;
    }
    alpha = PauliLabel::random(n, rng);
    beta = PauliLabel::random(n, rng);
    cur.assign(n, PauliPermutation{});
    for (int j = 0; j < d; ++j) {
      for (uint32_t q = 0; q < n; ++q) {
        const auto layer_perm =
            perm_of_single_qubit_clifford(static_cast<unsigned>(rng.bounded(24)));
        cur[q] = layer_perm.inverse().then(cur[q]);
        prop.rows[static_cast<size_t>(j) * n + q] = cur[q];
      }
      PauliLabel::random(n, rng);  // the Pauli twirl a_j; label action telescopes out
    }
  }
};

}  // namespace detail

namespace detail {

template <typename ShotFn>
inline std::vector<ShotRecord> collect_generic(const ExperimentPlan& plan,
                                               const CollectOptions& opt, ShotFn&& shot_fn) {
  plan.validate();
  const size_t per_depth = static_cast<size_t>(plan.n_circuits) * plan.n_shots;
  std::vector<ShotRecord> records(per_depth * plan.depths.size());

  struct Task {
    int depth_index;
    int circuit;
  };
  std::vector<Task> tasks;
  tasks.reserve(plan.depths.size() * plan.n_circuits);
  for (size_t di = 0; di < plan.depths.size(); ++di)
    for (int i = 0; i < plan.n_circuits; ++i) tasks.push_back({static_cast<int>(di), i});

  auto run_task = [&](const Task& t, detail::CircuitDraw& circ) {
    const int d = plan.depths[t.depth_index];
    circ.fill(plan, d, t.circuit, opt.twirling);
    const size_t base = per_depth * t.depth_index + static_cast<size_t>(t.circuit) * plan.n_shots;
    for (int s = 0; s < plan.n_shots; ++s) {
      Rng rng(plan.seed, static_cast<uint64_t>(d), static_cast<uint64_t>(t.circuit),
              static_cast<uint64_t>(s));
      records[base + s] = ShotRecord{d, t.circuit, s, shot_fn(d, circ, rng)};
    }
  };

  const int workers = std::max(1, opt.workers);
  if (workers == 1) {
    detail::CircuitDraw circ;
    for (const Task& t : tasks) run_task(t, circ);
  } else {
    std::atomic<size_t> next{0};
    auto work = [&] {
      detail::CircuitDraw circ;
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        run_task(tasks[i], circ);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return records;
}

}  // namespace detail

/// Bell-frame Monte Carlo for the entanglement-enhanced protocol. Outcomes
/// are the twirl-corrected Bell labels mu = nu + alpha + beta.
inline std::vector<ShotRecord> collect_eel(const ExperimentPlan& plan,
                                           const CollectOptions& opt = {}) {
  if (plan.protocol != Protocol::eel) throw DomainError("collect_eel: plan protocol mismatch");
  const uint32_t n = plan.n;
  const uint64_t nmask = n >= 64 ? ~0ULL : ((1ULL << n) - 1);
  const detail::GateAction gate = detail::GateAction::build(plan.gate);

  return detail::collect_generic(plan, opt, [&](int d, const detail::CircuitDraw& circ, Rng& rng) {
    const PauliLabel prep = plan.spam.state_prep.sample_error(rng);
    uint64_t fsx = prep.x & nmask, fsz = prep.z & nmask;  // system frame
    uint64_t fax = prep.x >> n, faz = prep.z >> n;        // ancilla frame, post-propagation
    for (int j = 0; j < d; ++j) {
      gate.apply(fsx, fsz);
      uint64_t ex, ez, wx, wz;
      if (plan.crosstalk) {
        const PauliLabel joint = plan.crosstalk->sample_error(rng);
        ex = joint.x & nmask;
        ez = joint.z & nmask;
        wx = joint.x >> n;
        wz = joint.z >> n;
      } else {
        const PauliLabel e = plan.system_noise.sample_error(rng);
        const PauliLabel w = plan.ancilla_noise.sample_error(rng);
        ex = e.x;
        ez = e.z;
        wx = w.x;
        wz = w.z;
      }
      fsx ^= ex;
      fsz ^= ez;
      detail::AncillaPropagation::apply_row(circ.prop.row(j), wx, wz);
      fax ^= wx;
      faz ^= wz;
    }
    const PauliLabel meas = plan.spam.measurement.sample_error(rng);
    fsx ^= meas.x & nmask;
    fsz ^= meas.z & nmask;
    fax ^= meas.x >> n;
    faz ^= meas.z >> n;
    // Raw Bell outcome: system and ancilla labels both shift it, plus the
    // alpha/beta measurement twirls; correcting removes the twirl shifts.
    const uint64_t nu_x = fsx ^ fax ^ circ.alpha.x ^ circ.beta.x;
    const uint64_t nu_z = fsz ^ faz ^ circ.alpha.z ^ circ.beta.z;
    return PauliLabel(n, nu_x ^ circ.alpha.x ^ circ.beta.x, nu_z ^ circ.alpha.z ^ circ.beta.z);
  });
}

/// Computational-basis Monte Carlo on the ancilla register only. Outcomes
/// are the corrected bit vectors k = l + alpha_x, stored in the x half.
inline std::vector<ShotRecord> collect_aux_efl(const ExperimentPlan& plan,
                                               const CollectOptions& opt = {}) {
  if (plan.protocol != Protocol::aux_efl)
    throw DomainError("collect_aux_efl: plan protocol mismatch");
  const uint32_t n = plan.n;

  return detail::collect_generic(plan, opt, [&](int d, const detail::CircuitDraw& circ, Rng& rng) {
    const PauliLabel prep = plan.spam.state_prep.sample_error(rng);
    uint64_t fx = prep.x, fz = prep.z;
    for (int j = 0; j < d; ++j) {
      PauliLabel w(0, 0, 0);
      if (plan.crosstalk)
        w = plan.crosstalk->sample_error(rng).slice(n, n);
      else
        w = plan.ancilla_noise.sample_error(rng);
      uint64_t wx = w.x, wz = w.z;
      detail::AncillaPropagation::apply_row(circ.prop.row(j), wx, wz);
      fx ^= wx;
      fz ^= wz;
    }
    const PauliLabel meas = plan.spam.measurement.sample_error(rng);
    fx ^= meas.x;
    const uint64_t l = fx ^ circ.alpha.x;  // raw measured bits
    return PauliLabel(n, l ^ circ.alpha.x, 0);
  });
}

/// Direct product-basis Monte Carlo on the system register. Outcomes are the
/// per-qubit measurement flip vectors, stored in the x half.
inline std::vector<ShotRecord> collect_efl(const ExperimentPlan& plan,
                                           const CollectOptions& opt = {}) {
  if (plan.protocol != Protocol::efl) throw DomainError("collect_efl: plan protocol mismatch");
  const uint32_t n = plan.n;
  const detail::GateAction gate = detail::GateAction::build(plan.gate);
  const uint64_t bx = plan.basis.x, bz = plan.basis.z;

  return detail::collect_generic(plan, opt, [&](int d, const detail::CircuitDraw&, Rng& rng) {
    const PauliLabel prep = plan.spam.state_prep.sample_error(rng);
    uint64_t fx = prep.x, fz = prep.z;
    for (int j = 0; j < d; ++j) {
      gate.apply(fx, fz);
      const PauliLabel e = plan.system_noise.sample_error(rng);
      fx ^= e.x;
      fz ^= e.z;
    }
    const PauliLabel meas = plan.spam.measurement.sample_error(rng);
    fx ^= meas.x;
    fz ^= meas.z;
    // Qubit j flips iff the accumulated error anticommutes with the basis
    // Pauli on that qubit.
    const uint64_t v = (fx & bz) ^ (fz & bx);
    return PauliLabel(n, v, 0);
  });
}

inline std::vector<ShotRecord> collect(const ExperimentPlan& plan, const CollectOptions& opt = {}) {
  switch (plan.protocol) {
    case Protocol::eel: return collect_eel(plan, opt);
    case Protocol::aux_efl: return collect_aux_efl(plan, opt);
    default: return collect_efl(plan, opt);
  }
}

// ---------------------------------------------------------------------------
// Closed-form outcome distributions (dense oracles, n <= 3)
// ---------------------------------------------------------------------------

inline constexpr uint32_t kOracleCap = 3;

namespace detail {

inline std::vector<double> pattern_mean_eigenvalues(const Channel& c) {
  const uint32_t n = c.n();
  std::vector<double> sum(size_t{1} << n, 0.0), cnt(size_t{1} << n, 0.0);
  for (size_t i = 0; i < (size_t{1} << (2 * n)); ++i) {
    const PauliLabel a = label_from_dense_index(n, i);
    sum[pattern(a)] += c.eigenvalue(a);
    cnt[pattern(a)] += 1.0;
  }
  for (size_t s = 0; s < sum.size(); ++s) sum[s] /= cnt[s];
  return sum;
}

/// Mean joint eigenvalue over ancilla labels b in the pattern class of s,
/// with the system label fixed: the per-layer factor of the crosstalk-aware
/// oracle.
inline double class_mean_joint(const Channel& joint, const PauliLabel& sys_label, uint64_t s,
                               uint32_t n) {
  double sum = 0.0;
  int count = 0;
  // Enumerate labels with pattern exactly s.
  std::vector<uint32_t> qubits;
  for (uint64_t bits = s; bits; bits &= bits - 1) qubits.push_back(std::countr_zero(bits));
  size_t combos = 1;
  for (size_t i = 0; i < qubits.size(); ++i) combos *= 3;
  for (size_t c = 0; c < combos; ++c) {
    PauliLabel b(n, 0, 0);
    size_t rem = c;
    for (uint32_t q : qubits) {
      b.set_code(q, 1 + static_cast<unsigned>(rem % 3));
      rem /= 3;
    }
    sum += joint.eigenvalue(joint_label(sys_label, b));
    ++count;
  }
  return sum / count;
}

}  // namespace detail

/// Exact outcome distribution of collect_eel over the 4^n corrected labels,
/// indexed densely: Pr[z] = 4^-n sum_a (-1)^{<a,z>} xi_{a,a}
/// (lambda'_{pt(a)})^d lambda-bar_a^d, with the general-depth boundary
/// handled exactly via the inverse gate action.
inline std::vector<double> closed_form_eel_distribution(const ExperimentPlan& plan, int d) {
  plan.validate();
  if (plan.n > kOracleCap) throw CapacityError("closed_form_eel_distribution: n exceeds oracle cap");
  const uint32_t n = plan.n;
  const CliffordMap ginv = plan.gate.inverse();
  const std::vector<double> anc_pattern =
      plan.crosstalk ? std::vector<double>{} : detail::pattern_mean_eigenvalues(plan.ancilla_noise);

  std::vector<double> coef(size_t{1} << (2 * n));
  for (size_t i = 0; i < coef.size(); ++i) {
    const PauliLabel a = label_from_dense_index(n, i);
    PauliLabel a_back = a;  // G^-k (a)
    double prod = 1.0;
    if (plan.crosstalk) {
      for (int j = d; j >= 1; --j) {
        // Noise of layer j is propagated by G^{d-j}; walking a_back keeps
        // G^-(d-j)(a) available in step order j = d, d-1, ...
        prod *= detail::class_mean_joint(*plan.crosstalk, a_back, pattern(a), n);
        a_back = ginv.apply_label(a_back);
      }
    } else {
      const double anc_factor = anc_pattern[pattern(a)];
      for (int j = d; j >= 1; --j) {
        prod *= plan.system_noise.eigenvalue(a_back) * anc_factor;
        a_back = ginv.apply_label(a_back);
      }
    }
    // a_back is now G^-d(a): the state-prep side of the boundary.
    coef[i] = plan.spam.measurement.eigenvalue(joint_label(a, a)) *
              plan.spam.state_prep.eigenvalue(joint_label(a_back, a)) * prod;
  }
  return wht_eigen_to_rates(std::move(coef), n);
}

/// Exact distribution of collect_aux_efl over the 2^n corrected bit vectors:
/// Pr[z] = 2^-n sum_mu (-1)^{z.mu} xi'_mu (lambda^anc_mu)^d.
inline std::vector<double> closed_form_aux_distribution(const ExperimentPlan& plan, int d) {
  plan.validate();
  if (plan.n > kOracleCap) throw CapacityError("closed_form_aux_distribution: n exceeds oracle cap");
  const uint32_t n = plan.n;
  std::vector<double> anc_pattern;
  if (plan.crosstalk) {
    anc_pattern.resize(size_t{1} << n);
    const PauliLabel id = PauliLabel::identity(n);
    for (uint64_t s = 0; s < anc_pattern.size(); ++s)
      anc_pattern[s] = detail::class_mean_joint(*plan.crosstalk, id, s, n);
  } else {
    anc_pattern = detail::pattern_mean_eigenvalues(plan.ancilla_noise);
  }

  const size_t size = size_t{1} << n;
  std::vector<double> m(size);
  for (uint64_t s = 0; s < size; ++s) {
    const PauliLabel zs(n, 0, s);
    m[s] = plan.spam.state_prep.eigenvalue(zs) * plan.spam.measurement.eigenvalue(zs) *
           std::pow(anc_pattern[s], d);
  }
  std::vector<double> pr(size, 0.0);
  for (uint64_t z = 0; z < size; ++z) {
    double acc = 0.0;
    for (uint64_t s = 0; s < size; ++s)
      acc += (std::popcount(z & s) & 1) ? -m[s] : m[s];
    pr[z] = acc / static_cast<double>(size);
  }
  return pr;
}

/// Exact distribution of collect_efl over the 2^n flip vectors.
inline std::vector<double> closed_form_efl_distribution(const ExperimentPlan& plan, int d) {
  plan.validate();
  if (plan.n > kOracleCap) throw CapacityError("closed_form_efl_distribution: n exceeds oracle cap");
  const uint32_t n = plan.n;
  const CliffordMap ginv = plan.gate.inverse();
  const size_t size = size_t{1} << n;
  std::vector<double> m(size);
  for (uint64_t s = 0; s < size; ++s) {
    // Basis-restricted Pauli with pattern s.
    PauliLabel a(n, plan.basis.x & s, plan.basis.z & s);
    PauliLabel a_back = a;
    double prod = 1.0;
    for (int k = 0; k < d; ++k) {
      prod *= plan.system_noise.eigenvalue(a_back);
      a_back = ginv.apply_label(a_back);
    }
    m[s] = plan.spam.measurement.eigenvalue(a) * plan.spam.state_prep.eigenvalue(a_back) * prod;
  }
  std::vector<double> pr(size, 0.0);
  for (uint64_t z = 0; z < size; ++z) {
    double acc = 0.0;
    for (uint64_t s = 0; s < size; ++s)
      acc += (std::popcount(z & s) & 1) ? -m[s] : m[s];
    pr[z] = acc / static_cast<double>(size);
  }
  return pr;
}

inline std::vector<double> closed_form_distribution(const ExperimentPlan& plan, int d) {
  switch (plan.protocol) {
    case Protocol::eel: return closed_form_eel_distribution(plan, d);
    case Protocol::aux_efl: return closed_form_aux_distribution(plan, d);
    default: return closed_form_efl_distribution(plan, d);
  }
}

// ---------------------------------------------------------------------------
// Noise-injection emulation
// ---------------------------------------------------------------------------

/// Target channel for subsampling a pool of uniformly inserted Paulis.
struct InjectedTarget {
  bool depolarizing = true;
  PauliLabel k;
  double lambda_k = 0.0;  // +-1/3 in the hypothesis-testing game
};

/// Pick a size-m subset of pool indices whose inserted Paulis emulate the
/// target channel: uniform for the depolarizing hypothesis, or split between
/// the commuting/anticommuting cosets of k via Binomial(m, (1+lambda_k)/2).
inline std::vector<size_t> emulate_injected_channel(const std::vector<PauliLabel>& pool, size_t m,
                                                    const InjectedTarget& target, Rng& rng) {
  if (pool.size() < m) throw PoolExhaustedError("emulate_injected_channel: pool smaller than m");
  auto pick = [&rng](std::vector<size_t>& from, size_t count) {
    for (size_t i = 0; i < count; ++i) {
      const size_t j = i + rng.bounded(from.size() - i);
      std::swap(from[i], from[j]);
    }
    from.resize(count);
  };

  if (target.depolarizing) {
    std::vector<size_t> idx(pool.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    pick(idx, m);
    return idx;
  }

  std::vector<size_t> commuting, anticommuting;
  for (size_t i = 0; i < pool.size(); ++i) {
    if (symplectic_inner(pool[i], target.k) == 0)
      commuting.push_back(i);
    else
      anticommuting.push_back(i);
  }
  const double p_comm = (1.0 + target.lambda_k) / 2.0;
  const size_t n_comm = rng.binomial(m, p_comm);
  if (n_comm > commuting.size() || m - n_comm > anticommuting.size())
    throw PoolExhaustedError("emulate_injected_channel: pool cannot realize the commuting split");
  pick(commuting, n_comm);
  pick(anticommuting, m - n_comm);
  commuting.insert(commuting.end(), anticommuting.begin(), anticommuting.end());
  return commuting;
}

}  // namespace paulilearn
