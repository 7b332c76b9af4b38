#pragma once
// Syndrome extraction, the syndrome lookup table, and the two recovery
// backends:
//   * a projector/transfer recovery built from the normalized error
//     states of every correctable damping pattern (reference backend,
//     any (w, K));
//   * a gate-level recovery for w = 1 codes: syndrome CNOTs and ancilla
//     measurement, per-syndrome X corrections, artificial-damping
//     rebalancing, and re-encoding CNOTs.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adshor/channels.hpp"
#include "adshor/code.hpp"
#include "adshor/pauli.hpp"
#include "adshor/state.hpp"

namespace adshor {

struct Syndrome {
  std::vector<std::uint8_t> bits;  // block-major, same order as z_stabilizers

  Syndrome() = default;
  explicit Syndrome(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

  static Syndrome from_string(const std::string& s) {
    std::vector<std::uint8_t> b;
    b.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("Syndrome: expected 0/1");
      b.push_back(c == '1');
    }
    return Syndrome(std::move(b));
  }

  bool trivial() const {
    for (auto b : bits)
      if (b) return false;
    return true;
  }

  int weight() const {
    int w = 0;
    for (auto b : bits) w += b;
    return w;
  }

  std::string str() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) s[i] = '1';
    return s;
  }

  bool operator==(const Syndrome& o) const { return bits == o.bits; }
  bool operator<(const Syndrome& o) const { return bits < o.bits; }
};

struct SyndromeBranch {
  Syndrome syndrome;
  StateVector state;  // un-renormalized projection onto the syndrome sector
  double weight = 0.0;
};

// Splits a state into simultaneous eigensectors of the Z generators.  For
// damping branches of a codeword the split is deterministic: exactly one
// sector survives.
inline std::vector<SyndromeBranch> extract_syndrome(const StateVector& state,
                                                    const CodeSpec& spec,
                                                    double prune = 1e-24) {
  require_base_code(spec, "extract_syndrome");
  if (state.n_qubits != spec.base_qubits())
    throw std::invalid_argument("extract_syndrome: register size mismatch");
  const std::vector<PauliString> gens = z_stabilizers(spec);

  std::vector<SyndromeBranch> sectors;
  sectors.push_back({Syndrome{}, state, 0.0});
  for (const PauliString& gen : gens) {
    std::vector<SyndromeBranch> next;
    for (SyndromeBranch& sec : sectors) {
      const StateVector gs = apply(gen, sec.state);
      for (int bit = 0; bit < 2; ++bit) {
        StateVector proj = sec.state;
        const double sign = bit ? -0.5 : 0.5;
        for (std::size_t i = 0; i < proj.amps.size(); ++i)
          proj.amps[i] = 0.5 * sec.state.amps[i] + sign * gs.amps[i];
        const double w = proj.squared_norm();
        if (w <= prune) continue;
        SyndromeBranch b;
        b.syndrome.bits = sec.syndrome.bits;
        b.syndrome.bits.push_back(static_cast<std::uint8_t>(bit));
        b.state = std::move(proj);
        next.push_back(std::move(b));
      }
    }
    sectors = std::move(next);
  }
  for (SyndromeBranch& sec : sectors) sec.weight = sec.state.squared_norm();
  return sectors;
}

// Deterministic syndrome of a single damping branch.
inline Syndrome syndrome_of(const CodeSpec& spec, const ErrorString& a) {
  StateVector branch = apply_error_string(codeword(spec, 0), a, 0.5);
  std::vector<SyndromeBranch> sectors = extract_syndrome(branch, spec);
  if (sectors.size() != 1)
    throw std::logic_error("syndrome_of: damping branch was not syndrome-deterministic");
  return sectors[0].syndrome;
}

struct SyndromeTable {
  // Every minimum-weight damping pattern consistent with the syndrome;
  // the canonical pick is the lexicographically first one (lowest qubit
  // indices).  Ambiguous entries keep all candidates.
  std::map<std::string, std::vector<ErrorString>> entries;

  const std::vector<ErrorString>* lookup(const Syndrome& s) const {
    auto it = entries.find(s.str());
    return it == entries.end() ? nullptr : &it->second;
  }

  ErrorString canonical(const Syndrome& s) const {
    const auto* cands = lookup(s);
    if (!cands || cands->empty()) throw std::out_of_range("SyndromeTable: unknown syndrome");
    return (*cands)[0];
  }
};

inline SyndromeTable build_table(const CodeSpec& spec) {
  require_base_code(spec, "build_table");
  SyndromeTable table;
  for (const ErrorString& a : error_strings_up_to(spec.base_qubits(), spec.w)) {
    const std::string key = syndrome_of(spec, a).str();
    auto& cands = table.entries[key];
    if (cands.empty() || a.weight() < cands[0].weight()) {
      cands.assign(1, a);
    } else if (a.weight() == cands[0].weight()) {
      cands.push_back(a);  // recorded collision, never overwritten
    }
  }
  for (auto& [key, cands] : table.entries)
    std::sort(cands.begin(), cands.end(),
              [](const ErrorString& x, const ErrorString& y) { return x.mask > y.mask; });
  return table;
}

// ---- projector / transfer recovery --------------------------------------

// Holds the codewords and the normalized error states |i'_(k)> of every
// damping pattern with 1 <= wt(k) <= max_weight, after verifying their
// mutual orthogonality.  The recovery operator is
//     R = (I - P)/2 + sum_{i,k} |i><i'_(k)|
// with P the projector onto the error states.  The transfer sum alone maps
// each error branch exactly onto its codeword; the (I-P)/2 term is kept
// as a separately applicable piece so its effect on the trivial branch can
// be measured rather than hidden.
class ProjectorRecovery {
 public:
  struct ErrorState {
    std::uint64_t i;
    ErrorString k;
    StateVector normalized;
    double norm;  // ||A_k |i>||
  };

  ProjectorRecovery(const CodeSpec& spec, double gamma, int max_weight = -1,
                    double ortho_tol = 1e-10)
      : spec_(spec), gamma_(gamma) {
    const int wmax = max_weight < 0 ? spec.w : max_weight;
    for (std::uint64_t i = 0; i < dim_of(spec.K); ++i) codewords_.push_back(codeword(spec, i));
    for (const ErrorString& k : error_strings_up_to(spec.qubits(), wmax)) {
      if (k.weight() == 0) continue;
      for (std::uint64_t i = 0; i < dim_of(spec.K); ++i) {
        StateVector e = apply_error_string(codewords_[i], k, gamma);
        const double n2 = e.squared_norm();
        if (n2 <= 1e-300) continue;  // pattern annihilates this codeword
        const double n = std::sqrt(n2);
        e *= 1.0 / n;
        error_states_.push_back({i, k, std::move(e), n});
      }
    }
    gram_max_offdiag_ = compute_gram_offdiag();
    if (gram_max_offdiag_ > ortho_tol)
      throw std::domain_error("ProjectorRecovery: error states are not mutually orthogonal");
  }

  const CodeSpec& spec() const { return spec_; }
  double gamma() const { return gamma_; }
  double gram_max_offdiag() const { return gram_max_offdiag_; }
  const std::vector<ErrorState>& error_states() const { return error_states_; }
  const StateVector& codeword_state(std::uint64_t i) const { return codewords_[i]; }

  double error_norm(std::uint64_t i, const ErrorString& k) const {
    for (const ErrorState& e : error_states_)
      if (e.i == i && e.k == k) return e.norm;
    return 0.0;
  }

  // sum_{i,k} |i><i'_(k)| branch
  StateVector transfer(const StateVector& branch) const {
    StateVector out(spec_.qubits());
    for (const ErrorState& e : error_states_) {
      const cplx c = inner(e.normalized, branch);
      if (c == cplx{0.0, 0.0}) continue;
      StateVector term = codewords_[e.i];
      term *= c;
      out += term;
    }
    return out;
  }

  // (I - P)/2 branch + transfer(branch), exactly as written.
  StateVector literal(const StateVector& branch) const {
    StateVector out = branch;
    for (const ErrorState& e : error_states_) {
      const cplx c = inner(e.normalized, branch);
      StateVector term = e.normalized;
      term *= c;
      for (std::size_t j = 0; j < out.amps.size(); ++j) out.amps[j] -= term.amps[j];
    }
    out *= 0.5;
    out += transfer(branch);
    return out;
  }

 private:
  double compute_gram_offdiag() const {
    std::vector<const StateVector*> all;
    for (const StateVector& c : codewords_) all.push_back(&c);
    for (const ErrorState& e : error_states_) all.push_back(&e.normalized);
    double worst = 0.0;
    for (std::size_t a = 0; a < all.size(); ++a)
      for (std::size_t b = a + 1; b < all.size(); ++b)
        worst = std::max(worst, std::abs(inner(*all[a], *all[b])));
    return worst;
  }

  CodeSpec spec_;
  double gamma_;
  std::vector<StateVector> codewords_;
  std::vector<ErrorState> error_states_;
  double gram_max_offdiag_ = 0.0;
};

struct EnsembleRecovery {
  std::vector<ChannelBranch> recovered;
  double fidelity = 0.0;  // summed squared overlap with the reference state
};

// Applies the transfer recovery to every non-trivial branch of an
// ensemble; the trivial branch is left in place (the literal half-weight
// variant is available separately for diagnostics).
inline EnsembleRecovery projector_recover(const ProjectorRecovery& rec,
                                          const BranchEnsemble& ensemble,
                                          const StateVector& reference) {
  EnsembleRecovery out;
  for (const ChannelBranch& b : ensemble.branches) {
    ChannelBranch r;
    r.a = b.a;
    r.state = b.a.weight() == 0 ? b.state : rec.transfer(b.state);
    r.squared_norm = r.state.squared_norm();
    out.fidelity += std::norm(inner(reference, r.state));
    out.recovered.push_back(std::move(r));
  }
  return out;
}

// ---- artificial damping ---------------------------------------------------

// exp(-i theta/2 Y) controlled on `control`, acting on `target`.
inline LocalOperator cy_rotation(double theta, int control, int target) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  std::vector<cplx> m(16, cplx{0.0, 0.0});
  m[0 * 4 + 0] = 1.0;
  m[1 * 4 + 1] = 1.0;
  m[2 * 4 + 2] = c;
  m[2 * 4 + 3] = -s;
  m[3 * 4 + 2] = s;
  m[3 * 4 + 3] = c;
  return LocalOperator(2, std::move(m), {control, target});
}

// One branch of the ancilla-assisted damping channel of rate gamma_prime:
// outcome 0 applies |0><0| + sqrt(1-gamma')|1><1|, outcome 1 applies
// sqrt(gamma')|0><1| (the conditional X correction already folded in).
inline MeasurementRecord artificial_ad(const StateVector& state, int qubit, double gamma_prime,
                                       int outcome) {
  check_gamma(gamma_prime);
  if (outcome != 0 && outcome != 1)
    throw std::invalid_argument("artificial_ad: outcome must be 0/1");
  MeasurementRecord rec;
  rec.qubit = qubit;
  rec.outcome = outcome;
  rec.post_state = outcome == 0 ? apply_local(state, ad_a0(gamma_prime, qubit))
                                : apply_local(state, ad_a1(gamma_prime, qubit));
  rec.probability = rec.post_state.squared_norm();
  if (outcome == 1 && rec.probability <= 1e-30)
    throw std::domain_error("artificial_ad: post-selected branch has zero probability");
  return rec;
}

inline std::pair<MeasurementRecord, MeasurementRecord> artificial_ad(const StateVector& state,
                                                                     int qubit,
                                                                     double gamma_prime) {
  MeasurementRecord zero;
  zero.qubit = qubit;
  zero.outcome = 0;
  zero.post_state = apply_local(state, ad_a0(gamma_prime, qubit));
  zero.probability = zero.post_state.squared_norm();
  MeasurementRecord one;
  one.qubit = qubit;
  one.outcome = 1;
  one.post_state = apply_local(state, ad_a1(gamma_prime, qubit));
  one.probability = one.post_state.squared_norm();
  return {std::move(zero), std::move(one)};
}

// ---- gate-level recovery for w = 1 codes ---------------------------------

struct RecoveredBranch {
  Syndrome syndrome;
  bool correctable = true;
  StateVector logical;  // K qubits, un-renormalized (empty when uncorrectable)
  double weight = 0.0;
};

struct CircuitRecoveryOutput {
  std::vector<RecoveredBranch> branches;
  std::vector<std::string> trace;
};

namespace detail {

// A register whose qubits keep their original ids across discards.
struct TrackedRegister {
  StateVector state;
  std::vector<int> ids;

  int pos(int id) const {
    for (std::size_t p = 0; p < ids.size(); ++p)
      if (ids[p] == id) return static_cast<int>(p);
    throw std::logic_error("TrackedRegister: qubit id not present");
  }
};

inline LocalOperator cnot_op(int control, int target) {
  std::vector<cplx> m(16, cplx{0.0, 0.0});
  m[0 * 4 + 0] = 1.0;
  m[1 * 4 + 1] = 1.0;
  m[2 * 4 + 3] = 1.0;
  m[3 * 4 + 2] = 1.0;
  return LocalOperator(2, std::move(m), {control, target});
}

inline void apply_cnot(TrackedRegister& reg, int control_id, int target_id) {
  reg.state = apply_local(reg.state, cnot_op(reg.pos(control_id), reg.pos(target_id)));
}

inline void apply_x(TrackedRegister& reg, int id) {
  reg.state = apply(PauliString(reg.state.n_qubits).set(reg.pos(id), Pauli::X), reg.state);
}

// diag(1, c) on one qubit.
inline void apply_rebalance(TrackedRegister& reg, int id, double c) {
  reg.state = apply_local(
      reg.state, single_qubit_op({cplx{1.0}, cplx{0.0}, cplx{0.0}, cplx{c}}, reg.pos(id)));
}

inline std::vector<TrackedRegister> discard_id(const TrackedRegister& reg, int id) {
  const int p = reg.pos(id);
  std::vector<TrackedRegister> out;
  for (StateVector& branch : discard(reg.state, p)) {
    TrackedRegister t;
    t.state = std::move(branch);
    t.ids = reg.ids;
    t.ids.erase(t.ids.begin() + p);
    out.push_back(std::move(t));
  }
  return out;
}

// Re-orders the remaining wires into logical order.
inline StateVector read_logical(const TrackedRegister& reg, const std::vector<int>& wire_ids) {
  const int K = static_cast<int>(wire_ids.size());
  std::vector<int> wire_pos(K);
  for (int ell = 0; ell < K; ++ell) wire_pos[ell] = reg.pos(wire_ids[ell]);
  StateVector out(K);
  for (std::uint64_t idx = 0; idx < reg.state.dim(); ++idx) {
    if (reg.state.amps[idx] == cplx{0.0, 0.0}) continue;
    std::uint64_t lidx = 0;
    for (int ell = 0; ell < K; ++ell)
      lidx = (lidx << 1) | static_cast<std::uint64_t>(
                               bit_at(idx, reg.state.n_qubits, wire_pos[ell]));
    out.amps[lidx] += reg.state.amps[idx];
  }
  return out;
}

}  // namespace detail

// Gate-level recovery for (w=1, K) codes.  Procedure:
//   1. syndrome extraction with CNOTs (control 2b -> target 2b+1 per
//      block b) and measurement of the odd qubits;
//   2. per syndrome, on the retained even qubits r_b = 2b:
//        trivial       : fan-out CNOT from r_0 onto every logical
//                        representative, then discard r_0;
//        block b >= 1  : discard r_b, X on every remaining retained
//                        qubit, rebalance them by diag(1, sqrt(1-gamma)),
//                        then fan-out CNOT from r_0; r_0 takes over the
//                        damaged logical qubit;
//        block 0       : discard r_0, X on the logical representatives,
//                        rebalance them by diag(1, 1-gamma);
//      multi-block syndromes are beyond the weight-1 set and are flagged
//      uncorrectable.
inline CircuitRecoveryOutput circuit_recover(const StateVector& error_state,
                                             const CodeSpec& spec, double gamma,
                                             double prune = 1e-24) {
  require_base_code(spec, "circuit_recover");
  if (spec.w != 1)
    throw std::invalid_argument("circuit_recover: gate-level backend covers w = 1 codes");
  if (error_state.n_qubits != spec.base_qubits())
    throw std::invalid_argument("circuit_recover: register size mismatch");
  check_gamma(gamma);
  const int K = spec.K;
  const int blocks = K + 1;

  CircuitRecoveryOutput out;

  detail::TrackedRegister full;
  full.state = error_state;
  full.ids.resize(error_state.n_qubits);
  for (int q = 0; q < error_state.n_qubits; ++q) full.ids[q] = q;
  for (int b = 0; b < blocks; ++b) detail::apply_cnot(full, 2 * b, 2 * b + 1);
  out.trace.push_back("syndrome CNOTs: controls on even qubits, targets on odd qubits");

  // Measure every odd qubit; branch over outcomes.
  struct Partial {
    StateVector state;
    std::vector<std::uint8_t> bits;
  };
  std::vector<Partial> partials{{full.state, {}}};
  for (int b = 0; b < blocks; ++b) {
    std::vector<Partial> next;
    for (Partial& p : partials) {
      // Measured qubit position: odd qubits before block b are gone.
      const int pos = 2 * b + 1 - b;
      for (int outcome = 0; outcome < 2; ++outcome) {
        const MeasurementRecord rec = project_z(p.state, pos, outcome);
        if (rec.probability <= prune) continue;
        std::vector<StateVector> rem = discard(rec.post_state, pos);
        if (rem.size() != 1) throw std::logic_error("circuit_recover: measured qubit persists");
        Partial q;
        q.state = std::move(rem[0]);
        q.bits = p.bits;
        q.bits.push_back(static_cast<std::uint8_t>(outcome));
        next.push_back(std::move(q));
      }
    }
    partials = std::move(next);
  }

  for (Partial& p : partials) {
    Syndrome syn(p.bits);
    detail::TrackedRegister reg;
    reg.state = std::move(p.state);
    for (int b = 0; b < blocks; ++b) reg.ids.push_back(2 * b);

    RecoveredBranch rb;
    rb.syndrome = syn;

    const int weight = syn.weight();
    if (weight > 1) {
      rb.correctable = false;
      rb.weight = reg.state.squared_norm();
      out.branches.push_back(std::move(rb));
      out.trace.push_back("syndrome " + syn.str() + ": flagged uncorrectable");
      continue;
    }

    std::vector<int> logical_wires(K);

    if (weight == 0) {
      for (int ell = 0; ell < K; ++ell) detail::apply_cnot(reg, 0, 2 * (ell + 1));
      out.trace.push_back("syndrome " + syn.str() + ": fan-out CNOT from qubit 0, discard it");
      for (int ell = 0; ell < K; ++ell) logical_wires[ell] = 2 * (ell + 1);
      for (detail::TrackedRegister& t : detail::discard_id(reg, 0)) {
        RecoveredBranch b = rb;
        b.logical = detail::read_logical(t, logical_wires);
        b.weight = b.logical.squared_norm();
        out.branches.push_back(std::move(b));
      }
      continue;
    }

    int hit_block = 0;
    while (!syn.bits[hit_block]) ++hit_block;

    if (hit_block == 0) {
      // Check block damaged; the logical representatives are intact.
      std::vector<detail::TrackedRegister> regs = detail::discard_id(reg, 0);
      out.trace.push_back("syndrome " + syn.str() +
                          ": discard qubit 0, X + diag(1, 1-gamma) on logical representatives");
      for (int ell = 0; ell < K; ++ell) logical_wires[ell] = 2 * (ell + 1);
      for (detail::TrackedRegister& t : regs) {
        for (int ell = 0; ell < K; ++ell) {
          detail::apply_x(t, 2 * (ell + 1));
          detail::apply_rebalance(t, 2 * (ell + 1), 1.0 - gamma);
        }
        RecoveredBranch b = rb;
        b.logical = detail::read_logical(t, logical_wires);
        b.weight = b.logical.squared_norm();
        out.branches.push_back(std::move(b));
      }
      continue;
    }

    // Logical block damaged: qubit 0 reconstructs the damaged logical qubit.
    const int damaged = 2 * hit_block;
    const double root = std::sqrt(1.0 - gamma);
    std::vector<detail::TrackedRegister> regs = detail::discard_id(reg, damaged);
    out.trace.push_back("syndrome " + syn.str() + ": discard qubit " + std::to_string(damaged) +
                        ", X + diag(1, sqrt(1-gamma)) on the rest, fan-out CNOT from qubit 0");
    for (int ell = 0; ell < K; ++ell)
      logical_wires[ell] = (ell == hit_block - 1) ? 0 : 2 * (ell + 1);
    for (detail::TrackedRegister& t : regs) {
      for (int id : t.ids) {
        detail::apply_x(t, id);
        detail::apply_rebalance(t, id, root);
      }
      for (int id : t.ids)
        if (id != 0) detail::apply_cnot(t, 0, id);
      RecoveredBranch b = rb;
      b.logical = detail::read_logical(t, logical_wires);
      b.weight = b.logical.squared_norm();
      out.branches.push_back(std::move(b));
    }
  }
  return out;
}

// ---- logical readout ------------------------------------------------------

struct LogicalDecomposition {
  std::vector<cplx> amps;  // 2^K codeword coefficients
  double leakage = 0.0;    // squared norm outside the codespace
};

inline LogicalDecomposition decode_logical(const StateVector& state, const CodeSpec& spec) {
  if (state.n_qubits != spec.qubits())
    throw std::invalid_argument("decode_logical: register size mismatch");
  LogicalDecomposition out;
  out.amps.resize(dim_of(spec.K));
  double captured = 0.0;
  for (std::uint64_t i = 0; i < dim_of(spec.K); ++i) {
    out.amps[i] = inner(codeword(spec, i), state);
    captured += std::norm(out.amps[i]);
  }
  out.leakage = std::max(0.0, state.squared_norm() - captured);
  return out;
}

}  // namespace adshor
