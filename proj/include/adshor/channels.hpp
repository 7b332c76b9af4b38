#pragma once
// Exact noise models: single-qubit amplitude damping, multi-qubit damping
// branches, the collective-coherent rotation, their composition, and the
// stochastic-Pauli comparison channel.
//
// The damping Kraus pair at rate gamma is
//   A0 = |0><0| + sqrt(1-gamma)|1><1|,   A1 = sqrt(gamma)|0><1|,
// and a damping pattern a applies A1 on the set bits of a, A0 elsewhere.
// Branch enumeration is exact up to a weight cutoff; the neglected tail is
// bounded by the binomial tail of the all-excited state and reported with
// every truncated result.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "adshor/state.hpp"

namespace adshor {

inline void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("damping rate must lie in [0, 1]");
}

inline LocalOperator ad_a0(double gamma, int target = 0) {
  check_gamma(gamma);
  return single_qubit_op({cplx{1.0}, cplx{0.0}, cplx{0.0}, cplx{std::sqrt(1.0 - gamma)}},
                         target);
}

inline LocalOperator ad_a1(double gamma, int target = 0) {
  check_gamma(gamma);
  return single_qubit_op({cplx{0.0}, cplx{std::sqrt(gamma)}, cplx{0.0}, cplx{0.0}}, target);
}

struct KrausSet {
  std::string label;
  std::vector<LocalOperator> ops;
};

inline KrausSet ad_kraus(double gamma, int target = 0) {
  return KrausSet{"amplitude-damping", {ad_a0(gamma, target), ad_a1(gamma, target)}};
}

// Max |(sum_k K^dag K - I)_{rc}| over the targeted subspace.
inline double completeness_defect(const KrausSet& set) {
  if (set.ops.empty()) throw std::invalid_argument("completeness_defect: empty Kraus set");
  const int arity = set.ops[0].arity;
  const std::uint64_t d = dim_of(arity);
  std::vector<cplx> acc(d * d, cplx{0.0, 0.0});
  for (const LocalOperator& op : set.ops) {
    if (op.arity != arity)
      throw std::invalid_argument("completeness_defect: mixed arities in Kraus set");
    for (std::uint64_t r = 0; r < d; ++r)
      for (std::uint64_t c = 0; c < d; ++c) {
        cplx s{0.0, 0.0};
        for (std::uint64_t m = 0; m < d; ++m) s += std::conj(op.entry(m, r)) * op.entry(m, c);
        acc[r * d + c] += s;
      }
  }
  double defect = 0.0;
  for (std::uint64_t r = 0; r < d; ++r)
    for (std::uint64_t c = 0; c < d; ++c) {
      const cplx want = (r == c) ? cplx{1.0} : cplx{0.0};
      defect = std::max(defect, std::abs(acc[r * d + c] - want));
    }
  return defect;
}

// A damping pattern over n qubits.  The mask uses amplitude-index bit
// positions (qubit 0 = MSB); the printable form has qubit 0 leftmost.
struct ErrorString {
  std::uint64_t mask = 0;
  int n_qubits = 0;

  ErrorString() = default;
  ErrorString(std::uint64_t m, int n) : mask(m), n_qubits(n) {
    if (n < 1 || n > 26) throw std::invalid_argument("ErrorString: bad register size");
    if (m >= dim_of(n)) throw std::invalid_argument("ErrorString: mask out of range");
  }

  static ErrorString none(int n) { return ErrorString(0, n); }

  static ErrorString from_positions(const std::vector<int>& damped, int n) {
    ErrorString e(0, n);
    for (int q : damped) {
      if (q < 0 || q >= n) throw std::out_of_range("ErrorString: qubit out of range");
      e.mask |= std::uint64_t{1} << bit_shift(n, q);
    }
    return e;
  }

  static ErrorString from_string(const std::string& s) {
    ErrorString e(0, static_cast<int>(s.size()));
    for (int q = 0; q < e.n_qubits; ++q) {
      if (s[q] == '1') e.mask |= std::uint64_t{1} << bit_shift(e.n_qubits, q);
      else if (s[q] != '0') throw std::invalid_argument("ErrorString: expected 0/1 characters");
    }
    return e;
  }

  int weight() const { return __builtin_popcountll(mask); }
  bool damps(int qubit) const { return bit_at(mask, n_qubits, qubit) != 0; }

  std::vector<int> positions() const {
    std::vector<int> out;
    for (int q = 0; q < n_qubits; ++q)
      if (damps(q)) out.push_back(q);
    return out;
  }

  std::string str() const {
    std::string s(n_qubits, '0');
    for (int q = 0; q < n_qubits; ++q)
      if (damps(q)) s[q] = '1';
    return s;
  }

  bool operator==(const ErrorString& o) const { return mask == o.mask && n_qubits == o.n_qubits; }
};

// Applies the product operator selected by the pattern as an index
// rewrite: inputs with a 0 at any damped position are annihilated, the
// surviving ones have those bits cleared and pick up
// sqrt(gamma)^wt * sqrt(1-gamma)^(number of undamped 1-bits).
inline StateVector apply_error_string(const StateVector& state, const ErrorString& a,
                                      double gamma) {
  if (a.n_qubits != state.n_qubits)
    throw std::invalid_argument("apply_error_string: register size mismatch");
  check_gamma(gamma);
  const double root_g = std::sqrt(gamma);
  const double root_s = std::sqrt(1.0 - gamma);
  const int wt = a.weight();

  StateVector out(state.n_qubits);
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (state.amps[i] == cplx{0.0, 0.0}) continue;
    if ((i & a.mask) != a.mask) continue;
    const int survivors = __builtin_popcountll(i) - wt;
    double coeff = 1.0;
    for (int j = 0; j < wt; ++j) coeff *= root_g;
    for (int j = 0; j < survivors; ++j) coeff *= root_s;
    out.amps[i & ~a.mask] += coeff * state.amps[i];
  }
  return out;
}

inline std::vector<ErrorString> error_strings_up_to(int n, int max_weight) {
  std::vector<ErrorString> out;
  for (std::uint64_t m = 0; m < dim_of(n); ++m)
    if (__builtin_popcountll(m) <= max_weight) out.push_back(ErrorString(m, n));
  return out;
}

// ---- collective coherent rotation -------------------------------------

// Diagonal entry for basis index b is exp(-i g dt (n - 2 wt(b))).
inline StateVector apply_cc(const StateVector& state, double g, double dt) {
  StateVector out = state;
  const int n = state.n_qubits;
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (out.amps[i] == cplx{0.0, 0.0}) continue;
    const double angle = -g * dt * (n - 2 * __builtin_popcountll(i));
    out.amps[i] *= cplx{std::cos(angle), std::sin(angle)};
  }
  return out;
}

// Dense form for small registers (tests and single-qubit factors).
inline LocalOperator cc_unitary(int n, double g, double dt) {
  if (n > 12) throw std::invalid_argument("cc_unitary: dense form limited to 12 qubits");
  const std::uint64_t d = dim_of(n);
  std::vector<cplx> m(d * d, cplx{0.0, 0.0});
  std::vector<int> targets(n);
  for (int q = 0; q < n; ++q) targets[q] = q;
  for (std::uint64_t i = 0; i < d; ++i) {
    const double angle = -g * dt * (n - 2 * __builtin_popcountll(i));
    m[i * d + i] = cplx{std::cos(angle), std::sin(angle)};
  }
  return LocalOperator(n, std::move(m), std::move(targets));
}

// ---- branch ensembles ---------------------------------------------------

struct ChannelBranch {
  ErrorString a;
  StateVector state;  // un-renormalized
  double squared_norm = 0.0;
};

struct BranchEnsemble {
  std::vector<ChannelBranch> branches;
  int cutoff = 0;
  double truncation_bound = 0.0;  // upper bound on the neglected probability
};

// P[Binom(n, gamma) > cutoff]; upper-bounds the neglected branch mass of
// any n-qubit input.
inline double truncation_tail_bound(int n, double gamma, int cutoff) {
  if (cutoff >= n) return 0.0;
  double kept = 0.0;
  for (int m = 0; m <= cutoff; ++m) {
    double term = 1.0;
    for (int j = 0; j < m; ++j) term *= static_cast<double>(n - j) / (j + 1);
    term *= std::pow(gamma, m) * std::pow(1.0 - gamma, n - m);
    kept += term;
  }
  return std::max(0.0, 1.0 - kept);
}

inline BranchEnsemble ad_branches(const StateVector& state, double gamma, int cutoff) {
  if (cutoff < 0 || cutoff > state.n_qubits)
    throw std::invalid_argument("ad_branches: cutoff out of range");
  BranchEnsemble out;
  out.cutoff = cutoff;
  out.truncation_bound = truncation_tail_bound(state.n_qubits, gamma, cutoff);
  for (const ErrorString& a : error_strings_up_to(state.n_qubits, cutoff)) {
    ChannelBranch b;
    b.a = a;
    b.state = apply_error_string(state, a, gamma);
    b.squared_norm = b.state.squared_norm();
    out.branches.push_back(std::move(b));
  }
  return out;
}

// Collective rotation followed by every damping branch up to the cutoff.
inline BranchEnsemble composite_cc_ad(const StateVector& state, double gamma, double g,
                                      double dt, int cutoff) {
  return ad_branches(apply_cc(state, g, dt), gamma, cutoff);
}

// Samples one damping pattern from the exact branch distribution by the
// per-qubit chain rule.  Only the Monte Carlo cross-check of the exact
// enumeration uses this; everything else is deterministic.
template <typename Rng>
ErrorString sample_damping_pattern(const StateVector& state, double gamma, Rng& rng) {
  check_gamma(gamma);
  StateVector cur = state;
  std::uint64_t mask = 0;
  for (int q = 0; q < state.n_qubits; ++q) {
    StateVector kept = apply_local(cur, ad_a0(gamma, q));
    StateVector damped = apply_local(cur, ad_a1(gamma, q));
    const double w0 = kept.squared_norm();
    const double w1 = damped.squared_norm();
    const double p1 = w1 / (w0 + w1);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < p1) {
      mask |= std::uint64_t{1} << bit_shift(state.n_qubits, q);
      cur = std::move(damped);
    } else {
      cur = std::move(kept);
    }
  }
  return ErrorString(mask, state.n_qubits);
}

// ---- stochastic-Pauli comparison ---------------------------------------

struct PauliApproxCoeffs {
  double p0, p1, p2, p3;
};

inline PauliApproxCoeffs pauli_approx_coeffs(double gamma) {
  check_gamma(gamma);
  PauliApproxCoeffs c{1.0 - gamma / 2.0 - gamma * gamma / 16.0, gamma / 4.0, gamma / 4.0,
                      gamma * gamma / 16.0};
  if (c.p0 < 0.0) throw std::invalid_argument("pauli_approx: p0 negative at this gamma");
  return c;
}

inline KrausSet pauli_approx(double gamma, int target = 0) {
  const PauliApproxCoeffs c = pauli_approx_coeffs(gamma);
  const double s0 = std::sqrt(c.p0), s1 = std::sqrt(c.p1), s2 = std::sqrt(c.p2),
               s3 = std::sqrt(c.p3);
  KrausSet set;
  set.label = "stochastic-pauli-approximation";
  set.ops.push_back(single_qubit_op({cplx{s0}, cplx{0.0}, cplx{0.0}, cplx{s0}}, target));
  set.ops.push_back(single_qubit_op({cplx{0.0}, cplx{s1}, cplx{s1}, cplx{0.0}}, target));
  set.ops.push_back(
      single_qubit_op({cplx{0.0}, cplx{0.0, -s2}, cplx{0.0, s2}, cplx{0.0}}, target));
  set.ops.push_back(single_qubit_op({cplx{s3}, cplx{0.0}, cplx{0.0}, cplx{-s3}}, target));
  return set;
}

// ---- single-qubit density-matrix comparison -----------------------------

using Mat2 = std::array<cplx, 4>;  // row-major { r00, r01, r10, r11 }

inline void check_density_1q(const Mat2& rho, double tol = 1e-10) {
  if (std::abs(rho[0] + rho[3] - cplx{1.0}) > tol)
    throw std::invalid_argument("channel_delta: trace must be 1");
  if (std::abs(rho[1] - std::conj(rho[2])) > tol)
    throw std::invalid_argument("channel_delta: input must be Hermitian");
  if (rho[0].real() < -tol || rho[3].real() < -tol)
    throw std::invalid_argument("channel_delta: negative population");
  const double det = (rho[0] * rho[3] - rho[1] * rho[2]).real();
  if (det < -tol) throw std::invalid_argument("channel_delta: input not positive semidefinite");
}

inline Mat2 apply_kraus_1q(const Mat2& rho, const KrausSet& set) {
  Mat2 out{cplx{0.0}, cplx{0.0}, cplx{0.0}, cplx{0.0}};
  for (const LocalOperator& op : set.ops) {
    if (op.arity != 1) throw std::invalid_argument("apply_kraus_1q: need 1-qubit operators");
    const cplx a = op.matrix[0], b = op.matrix[1], c = op.matrix[2], d = op.matrix[3];
    // K rho K^dag
    const cplx t00 = a * rho[0] + b * rho[2], t01 = a * rho[1] + b * rho[3];
    const cplx t10 = c * rho[0] + d * rho[2], t11 = c * rho[1] + d * rho[3];
    out[0] += t00 * std::conj(a) + t01 * std::conj(b);
    out[1] += t00 * std::conj(c) + t01 * std::conj(d);
    out[2] += t10 * std::conj(a) + t11 * std::conj(b);
    out[3] += t10 * std::conj(c) + t11 * std::conj(d);
  }
  return out;
}

inline Mat2 ad_output_1q(const Mat2& rho, double gamma) {
  return apply_kraus_1q(rho, ad_kraus(gamma));
}

inline Mat2 pauli_approx_output_1q(const Mat2& rho, double gamma) {
  return apply_kraus_1q(rho, pauli_approx(gamma));
}

// Element-wise (true damping output) - (Pauli-approximated output).
inline Mat2 channel_delta(const Mat2& rho, double gamma) {
  check_density_1q(rho);
  const Mat2 ad = ad_output_1q(rho, gamma);
  const Mat2 pa = pauli_approx_output_1q(rho, gamma);
  return Mat2{ad[0] - pa[0], ad[1] - pa[1], ad[2] - pa[2], ad[3] - pa[3]};
}

}  // namespace adshor
