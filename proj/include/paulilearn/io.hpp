#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "paulilearn/channel.hpp"
#include "paulilearn/clifford.hpp"
#include "paulilearn/errors.hpp"
#include "paulilearn/protocol.hpp"

namespace paulilearn {

using json = nlohmann::json;

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string outcome_hex(const PauliLabel& a) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%llx:%llx", static_cast<unsigned long long>(a.x),
                static_cast<unsigned long long>(a.z));
  return buf;
}

/// Dense channel from CSV rows (pauli_string, eigenvalue); all 4^n labels
/// must be present and the identity eigenvalue must be 1.
inline DensePauliChannel dense_channel_from_csv(std::istream& in) {
  std::string line;
  std::vector<std::pair<PauliLabel, double>> entries;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("dense CSV: missing comma in '" + line + "'");
    std::string name = line.substr(0, comma);
    if (name == "pauli" || name == "pauli_string") continue;  // header
    entries.emplace_back(PauliLabel::parse(name), std::stod(line.substr(comma + 1)));
  }
  if (entries.empty()) throw ConfigError("dense CSV: no rows");
  const uint32_t n = entries.front().first.n;
  if (n > kDenseCap) throw CapacityError("dense CSV: n exceeds dense cap");
  std::vector<double> lambda(size_t{1} << (2 * n));
  std::vector<bool> seen(lambda.size(), false);
  for (auto& [label, value] : entries) {
    if (label.n != n) throw ConfigError("dense CSV: inconsistent qubit counts");
    const size_t idx = dense_index(label);
    if (seen[idx]) throw ConfigError("dense CSV: duplicate label " + label.str());
    seen[idx] = true;
    lambda[idx] = value;
  }
  for (bool s : seen)
    if (!s) throw ConfigError("dense CSV: incomplete eigenvalue table");
  return DensePauliChannel(n, std::move(lambda));
}

inline DensePauliChannel dense_channel_from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dense channel CSV '" + path + "'");
  return dense_channel_from_csv(in);
}

/// Channel spec parser for config files, e.g.
///   {"kind":"spiked","k":"XXII","sign":"+","eps":0.3333}
///   {"kind":"depolarizing","n":4}
///   {"kind":"pattern_product","per_qubit":[0.99,0.98]}
///   {"kind":"pattern","n":2,"fidelities":{"01":0.95,"10":0.97,"11":0.93}}
///   {"kind":"dense","csv":"channel.csv"} or {"kind":"dense","eigenvalues":{"II":1,...}}
///   {"kind":"tensor","factors":[...]}, {"kind":"compose","parts":[...]}
///   {"kind":"identity","n":3}
inline Channel parse_channel(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("channel spec must have a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") return Channel::identity(j.at("n").get<uint32_t>());
  if (kind == "depolarizing") return Channel::depolarizing(j.at("n").get<uint32_t>());
  if (kind == "spiked") {
    const PauliLabel k = PauliLabel::parse(j.at("k").get<std::string>());
    const std::string sign = j.at("sign").get<std::string>();
    if (sign != "+" && sign != "-") throw ConfigError("spiked channel: sign must be '+' or '-'");
    return Channel::spiked(k, sign == "+" ? +1 : -1, j.at("eps").get<double>());
  }
  if (kind == "pattern_product")
    return Channel::pattern_product(j.at("per_qubit").get<std::vector<double>>());
  if (kind == "pattern") {
    const uint32_t n = j.at("n").get<uint32_t>();
    std::vector<double> fid(size_t{1} << n, 1.0);
    for (const auto& [bits, value] : j.at("fidelities").items()) {
      if (bits.size() != n) throw ConfigError("pattern channel: pattern '" + bits + "' has wrong length");
      uint64_t s = 0;
      for (uint32_t q = 0; q < n; ++q) {
        if (bits[q] == '1')
          s |= 1ULL << q;
        else if (bits[q] != '0')
          throw ConfigError("pattern channel: bad pattern string '" + bits + "'");
      }
      fid[s] = value.get<double>();
    }
    return Channel::pattern_explicit(n, std::move(fid));
  }
  if (kind == "dense") {
    if (j.contains("csv")) return Channel::dense(dense_channel_from_csv_file(j.at("csv").get<std::string>()));
    const auto& eig = j.at("eigenvalues");
    std::stringstream csv;
    for (const auto& [name, value] : eig.items()) csv << name << ',' << value.get<double>() << '\n';
    return Channel::dense(dense_channel_from_csv(csv));
  }
  if (kind == "tensor") {
    std::vector<Channel> factors;
    for (const auto& f : j.at("factors")) factors.push_back(parse_channel(f));
    return Channel::tensor(std::move(factors));
  }
  if (kind == "compose") {
    const auto& parts = j.at("parts");
    if (parts.size() < 2) throw ConfigError("compose channel: need >= 2 parts");
    Channel acc = parse_channel(parts[0]);
    for (size_t i = 1; i < parts.size(); ++i) acc = Channel::compose(acc, parse_channel(parts[i]));
    return acc;
  }
  throw ConfigError("unknown channel kind '" + kind + "'");
}

/// SPAM spec: either explicit {"state_prep": ..., "measurement": ...} or the
/// shorthand {"per_qubit_fidelity": f, "n": m} for a product-form diagonal.
inline SPAMModel parse_spam(const json& j, uint32_t n) {
  if (j.contains("per_qubit_fidelity")) {
    const double f = j.at("per_qubit_fidelity").get<double>();
    return SPAMModel{Channel::pattern_product(std::vector<double>(n, f)), Channel::identity(n)};
  }
  SPAMModel spam{parse_channel(j.at("state_prep")), parse_channel(j.at("measurement"))};
  if (spam.state_prep.n() != n || spam.measurement.n() != n)
    throw ConfigError("SPAM channels must act on " + std::to_string(n) + " qubits");
  return spam;
}

/// Gate spec: a list of named constructors composed in application order.
inline CliffordMap parse_gate(const json& j, uint32_t n) {
  CliffordMap acc = CliffordMap::identity(n);
  if (j.is_string()) return CliffordMap::parse(j.get<std::string>(), n);
  for (const auto& g : j) acc = CliffordMap::parse(g.get<std::string>(), n).compose(acc);
  return acc;
}

/// Query set: explicit Pauli strings or {"max_weight": w} enumerating all
/// C(n,w) 3^w labels of weight <= w (identity included).
inline std::vector<PauliLabel> parse_queries(const json& j, uint32_t n) {
  std::vector<PauliLabel> out;
  if (j.is_array()) {
    for (const auto& q : j) {
      PauliLabel a = PauliLabel::parse(q.get<std::string>());
      if (a.n != n) throw ConfigError("query '" + a.str() + "' has wrong qubit count");
      out.push_back(a);
    }
    return out;
  }
  const int max_w = j.at("max_weight").get<int>();
  std::vector<uint32_t> combo;
  auto emit = [&](auto&& self, uint32_t start, int remaining) -> void {
    if (remaining == 0) {
      size_t dirs = 1;
      for (size_t i = 0; i < combo.size(); ++i) dirs *= 3;
      for (size_t c = 0; c < dirs; ++c) {
        PauliLabel a(n, 0, 0);
        size_t rem = c;
        for (uint32_t q : combo) {
          a.set_code(q, 1 + static_cast<unsigned>(rem % 3));
          rem /= 3;
        }
        out.push_back(a);
      }
      return;
    }
    for (uint32_t q = start; q + remaining <= n; ++q) {
      combo.push_back(q);
      self(self, q + 1, remaining - 1);
      combo.pop_back();
    }
  };
  for (int w = 0; w <= max_w; ++w) emit(emit, 0, w);
  return out;
}

/// Append a shot log in CSV form (depth, circuit, shot, outcome hex x:z).
inline void write_shot_csv(std::ostream& out, const std::vector<ShotRecord>& records) {
  out << "depth,circuit,shot,outcome\n";
  for (const auto& r : records)
    out << r.depth << ',' << r.circuit << ',' << r.shot << ',' << outcome_hex(r.outcome) << '\n';
}

inline json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return j;
}

}  // namespace paulilearn
