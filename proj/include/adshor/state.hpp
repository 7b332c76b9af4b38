#pragma once
// Dense complex state-vector algebra over multi-qubit registers.
//
// Conventions used throughout the library:
//   * qubit 0 is the leftmost tensor factor and the most significant bit
//     of an amplitude index (block i of a code occupies a contiguous,
//     left-to-right qubit range);
//   * non-unitary maps return the raw, un-renormalized branch vector and
//     callers track squared norms explicitly;
//   * all operations are pure functions of their inputs, so concurrent
//     evaluation of independent branches is safe.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adshor {

using cplx = std::complex<double>;

constexpr std::uint64_t dim_of(int n_qubits) { return std::uint64_t{1} << n_qubits; }

// Index bit position of a qubit (qubit 0 = MSB).
constexpr int bit_shift(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

constexpr int bit_at(std::uint64_t index, int n_qubits, int qubit) {
  return static_cast<int>((index >> bit_shift(n_qubits, qubit)) & 1u);
}

struct StateVector {
  int n_qubits = 0;
  std::vector<cplx> amps;

  StateVector() = default;

  explicit StateVector(int n) : n_qubits(validated(n)), amps(dim_of(n), cplx{0.0, 0.0}) {}

  StateVector(int n, std::vector<cplx> a) : n_qubits(validated(n)), amps(std::move(a)) {
    if (amps.size() != dim_of(n_qubits))
      throw std::invalid_argument("StateVector: amplitude count must be 2^n_qubits");
  }

  static StateVector basis(int n, std::uint64_t index) {
    StateVector s(n);
    if (index >= dim_of(n)) throw std::out_of_range("StateVector::basis: index out of range");
    s.amps[index] = 1.0;
    return s;
  }

  std::uint64_t dim() const { return dim_of(n_qubits); }

  double squared_norm() const {
    double acc = 0.0;
    for (const cplx& a : amps) acc += std::norm(a);
    return acc;
  }

  bool is_normalized(double tol = 1e-12) const {
    return std::abs(std::sqrt(squared_norm()) - 1.0) <= tol;
  }

  StateVector& normalize() {
    const double n2 = squared_norm();
    if (n2 <= 0.0) throw std::domain_error("StateVector::normalize: zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (cplx& a : amps) a *= inv;
    return *this;
  }

  StateVector& operator*=(cplx c) {
    for (cplx& a : amps) a *= c;
    return *this;
  }

  StateVector& operator+=(const StateVector& other) {
    if (other.n_qubits != n_qubits)
      throw std::invalid_argument("StateVector::operator+=: qubit count mismatch");
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] += other.amps[i];
    return *this;
  }

 private:
  static int validated(int n) {
    if (n < 1 || n > 26) throw std::invalid_argument("StateVector: n_qubits must be in [1, 26]");
    return n;
  }
};

// A k-local operator: dense 2^arity x 2^arity matrix contracted onto an
// ordered list of target qubits.  targets[0] corresponds to the most
// significant bit of the matrix row/column index.
struct LocalOperator {
  int arity = 0;
  std::vector<cplx> matrix;  // row-major, size 4^arity
  std::vector<int> targets;

  LocalOperator() = default;
  LocalOperator(int a, std::vector<cplx> m, std::vector<int> t)
      : arity(a), matrix(std::move(m)), targets(std::move(t)) {
    if (arity < 1 || arity > 12) throw std::invalid_argument("LocalOperator: arity out of range");
    const std::uint64_t d = dim_of(arity);
    if (matrix.size() != d * d)
      throw std::invalid_argument("LocalOperator: matrix size must be 4^arity");
    if (targets.size() != static_cast<std::size_t>(arity))
      throw std::invalid_argument("LocalOperator: arity/target count mismatch");
  }

  cplx entry(std::uint64_t row, std::uint64_t col) const {
    return matrix[row * dim_of(arity) + col];
  }
};

inline LocalOperator single_qubit_op(std::array<cplx, 4> m, int target) {
  return LocalOperator(1, {m[0], m[1], m[2], m[3]}, {target});
}

inline void check_targets(const StateVector& state, const std::vector<int>& targets) {
  std::uint64_t seen = 0;
  for (int q : targets) {
    if (q < 0 || q >= state.n_qubits) throw std::out_of_range("target qubit out of range");
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (seen & bit) throw std::invalid_argument("target qubits must be distinct");
    seen |= bit;
  }
}

// Contracts op's matrix onto the target qubits; every other amplitude index
// is carried along untouched.  Non-unitary matrices are allowed, so the
// output norm may be below 1.
inline StateVector apply_local(const StateVector& state, const LocalOperator& op) {
  check_targets(state, op.targets);
  const int n = state.n_qubits;
  const std::uint64_t d = state.dim();
  const std::uint64_t sub = dim_of(op.arity);

  std::vector<std::uint64_t> mask(op.targets.size());
  std::uint64_t all = 0;
  for (std::size_t j = 0; j < op.targets.size(); ++j) {
    mask[j] = std::uint64_t{1} << bit_shift(n, op.targets[j]);
    all |= mask[j];
  }

  // Address of sub-index s relative to a base index with all target bits 0.
  std::vector<std::uint64_t> offset(sub, 0);
  for (std::uint64_t s = 0; s < sub; ++s)
    for (std::size_t j = 0; j < mask.size(); ++j)
      if ((s >> (op.arity - 1 - static_cast<int>(j))) & 1u) offset[s] |= mask[j];

  StateVector out(n);
  std::vector<cplx> in(sub);
  for (std::uint64_t base = 0; base < d; ++base) {
    if (base & all) continue;
    for (std::uint64_t s = 0; s < sub; ++s) in[s] = state.amps[base | offset[s]];
    for (std::uint64_t r = 0; r < sub; ++r) {
      cplx acc{0.0, 0.0};
      for (std::uint64_t c = 0; c < sub; ++c) acc += op.entry(r, c) * in[c];
      out.amps[base | offset[r]] = acc;
    }
  }
  return out;
}

// <a|b>, conjugate-linear in the first argument.
inline cplx inner(const StateVector& a, const StateVector& b) {
  if (a.n_qubits != b.n_qubits) throw std::invalid_argument("inner: qubit count mismatch");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.amps.size(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
  return acc;
}

// Kronecker composition; qubit 0 of the result is qubit 0 of a.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out(a.n_qubits + b.n_qubits);
  const std::uint64_t db = b.dim();
  for (std::uint64_t ia = 0; ia < a.dim(); ++ia) {
    if (a.amps[ia] == cplx{0.0, 0.0}) continue;
    for (std::uint64_t ib = 0; ib < db; ++ib)
      out.amps[(ia << b.n_qubits) | ib] = a.amps[ia] * b.amps[ib];
  }
  return out;
}

struct MeasurementRecord {
  int qubit = 0;
  int outcome = 0;
  double probability = 0.0;   // squared norm of the projected branch
  StateVector post_state;     // raw projection, not renormalized
};

inline MeasurementRecord project_z(const StateVector& state, int qubit, int outcome) {
  if (qubit < 0 || qubit >= state.n_qubits)
    throw std::out_of_range("measure_z: qubit out of range");
  MeasurementRecord rec;
  rec.qubit = qubit;
  rec.outcome = outcome;
  rec.post_state = StateVector(state.n_qubits);
  const std::uint64_t bit = std::uint64_t{1} << bit_shift(state.n_qubits, qubit);
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (static_cast<int>((i & bit) != 0) != outcome) continue;
    rec.post_state.amps[i] = state.amps[i];
    rec.probability += std::norm(state.amps[i]);
  }
  return rec;
}

// Both branches of a Z measurement, deterministically.  Sampling, when
// wanted at all, lives in the CLI layer.
inline std::pair<MeasurementRecord, MeasurementRecord> measure_z(const StateVector& state,
                                                                 int qubit) {
  return {project_z(state, qubit, 0), project_z(state, qubit, 1)};
}

// Post-selected branch; rejects branches of (numerically) zero probability.
inline MeasurementRecord measure_z(const StateVector& state, int qubit, int outcome) {
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("measure_z: outcome must be 0/1");
  MeasurementRecord rec = project_z(state, qubit, outcome);
  if (rec.probability <= 1e-30)
    throw std::domain_error("measure_z: post-selected branch has zero probability");
  return rec;
}

// Removes `qubit` from the register and returns the retained-register
// branches for outcome 0 and 1, un-renormalized (weights are the squared
// norms).  Zero-weight branches are dropped.  Branches are never merged:
// the result is an incoherent ensemble even when the two retained states
// coincide.
inline std::vector<StateVector> discard(const StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits)
    throw std::out_of_range("discard: qubit out of range");
  if (state.n_qubits < 2)
    throw std::invalid_argument("discard: cannot discard the last qubit");
  const int n = state.n_qubits;
  const int shift = bit_shift(n, qubit);
  const std::uint64_t low = (std::uint64_t{1} << shift) - 1;

  std::vector<StateVector> out;
  for (int outcome = 0; outcome < 2; ++outcome) {
    StateVector branch(n - 1);
    double w = 0.0;
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
      if (static_cast<int>((i >> shift) & 1u) != outcome) continue;
      const std::uint64_t kept = ((i >> (shift + 1)) << shift) | (i & low);
      branch.amps[kept] = state.amps[i];
      w += std::norm(state.amps[i]);
    }
    if (w > 1e-30) out.push_back(std::move(branch));
  }
  return out;
}

}  // namespace adshor
