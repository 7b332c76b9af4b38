#pragma once
// The [[(w+1)(w+K), K]] code family and its dual-rail concatenation.
//
// A code is laid out as (w+K) blocks of (w+1) qubits each.  The first w
// blocks form the check register; block w+l carries logical qubit l.  A
// Z-basis codeword |i> is the uniform superposition over block-constant
// bit patterns: even-parity check patterns carry the logical string i on
// the logical blocks, odd-parity ones carry its bitwise complement.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "adshor/pauli.hpp"
#include "adshor/state.hpp"

namespace adshor {

struct CodeSpec {
  int w = 1;
  int K = 1;
  bool dual_rail = false;

  CodeSpec() = default;
  CodeSpec(int w_, int K_, bool dual_rail_ = false) : w(w_), K(K_), dual_rail(dual_rail_) {
    if (w < 1 || K < 1) throw std::invalid_argument("CodeSpec: w and K must be >= 1");
  }

  int blocks() const { return w + K; }
  int block_len() const { return w + 1; }
  int base_qubits() const { return (w + 1) * (w + K); }
  int qubits() const { return dual_rail ? 2 * base_qubits() : base_qubits(); }
  double rate() const { return static_cast<double>(K) / qubits(); }

  // First physical qubit of a block (non-dual-rail numbering).
  int block_start(int block) const { return (w + 1) * block; }
};

inline int logical_bit(std::uint64_t i, int ell, int K) {
  return static_cast<int>((i >> (K - 1 - ell)) & 1u);
}

// |0> -> |01>, |1> -> |10> on every physical qubit.
inline std::uint64_t dual_rail_expand_index(std::uint64_t index, int n_qubits) {
  std::uint64_t out = 0;
  for (int q = 0; q < n_qubits; ++q) {
    const int b = bit_at(index, n_qubits, q);
    out = (out << 2) | (b ? 0b10u : 0b01u);
  }
  return out;
}

inline StateVector dual_rail_expand(const StateVector& state) {
  StateVector out(2 * state.n_qubits);
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (state.amps[i] == cplx{0.0, 0.0}) continue;
    out.amps[dual_rail_expand_index(i, state.n_qubits)] = state.amps[i];
  }
  return out;
}

// Z-basis codeword for a K-bit logical string i (bit 0 of i is the
// leftmost logical qubit).
inline StateVector codeword(const CodeSpec& spec, std::uint64_t i) {
  if (i >= dim_of(spec.K)) throw std::invalid_argument("codeword: logical index out of range");
  const int n = spec.base_qubits();
  StateVector base(n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim_of(spec.w)));
  for (std::uint64_t a = 0; a < dim_of(spec.w); ++a) {
    const int parity = __builtin_popcountll(a) & 1;
    std::uint64_t index = 0;
    for (int block = 0; block < spec.blocks(); ++block) {
      const int bit = block < spec.w ? static_cast<int>((a >> (spec.w - 1 - block)) & 1u)
                                     : logical_bit(i, block - spec.w, spec.K) ^ parity;
      for (int j = 0; j < spec.block_len(); ++j) index = (index << 1) | bit;
    }
    base.amps[index] += amp;
  }
  return spec.dual_rail ? dual_rail_expand(base) : base;
}

// Isometric encoding: sum_i amps[i] |i>.  Rejects non-normalized input.
inline StateVector encode(const CodeSpec& spec, const std::vector<cplx>& logical_amps) {
  if (logical_amps.size() != dim_of(spec.K))
    throw std::invalid_argument("encode: need 2^K logical amplitudes");
  double n2 = 0.0;
  for (const cplx& a : logical_amps) n2 += std::norm(a);
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
    throw std::invalid_argument("encode: logical amplitudes must be normalized");
  StateVector out(spec.qubits());
  for (std::uint64_t i = 0; i < dim_of(spec.K); ++i) {
    if (logical_amps[i] == cplx{0.0, 0.0}) continue;
    StateVector cw = codeword(spec, i);
    cw *= logical_amps[i];
    out += cw;
  }
  return out;
}

inline void require_base_code(const CodeSpec& spec, const char* what) {
  if (spec.dual_rail)
    throw std::invalid_argument(std::string(what) + ": defined on the non-dual-rail code");
}

// w(w+K) generators Z_{(w+1)i+j} Z_{(w+1)i+j+1}, block-major then j-minor.
// The fixed ordering makes syndrome bit strings reproducible.
inline std::vector<PauliString> z_stabilizers(const CodeSpec& spec) {
  require_base_code(spec, "z_stabilizers");
  const int n = spec.base_qubits();
  std::vector<PauliString> gens;
  gens.reserve(spec.w * spec.blocks());
  for (int block = 0; block < spec.blocks(); ++block)
    for (int j = 0; j < spec.w; ++j) {
      const int q = spec.block_start(block) + j;
      gens.push_back(pauli_from_support(n, Pauli::Z, {q, q + 1}));
    }
  return gens;
}

// (w-1) pairwise block generators plus the wide generator spanning blocks
// w-1 .. w-1+K.
inline std::vector<PauliString> x_stabilizers(const CodeSpec& spec) {
  require_base_code(spec, "x_stabilizers");
  const int n = spec.base_qubits();
  std::vector<PauliString> gens;
  gens.reserve(spec.w);
  for (int i = 0; i + 1 < spec.w; ++i) {
    std::vector<int> support;
    for (int j = 0; j <= spec.w; ++j) {
      support.push_back(spec.block_start(i) + j);
      support.push_back(spec.block_start(i + 1) + j);
    }
    gens.push_back(pauli_from_support(n, Pauli::X, support));
  }
  std::vector<int> wide;
  for (int block = spec.w - 1; block <= spec.w - 1 + spec.K; ++block)
    for (int j = 0; j <= spec.w; ++j) wide.push_back(spec.block_start(block) + j);
  gens.push_back(pauli_from_support(n, Pauli::X, wide));
  return gens;
}

struct LogicalOps {
  std::vector<PauliString> x;  // X on logical block w+l
  std::vector<PauliString> z;  // Z on the first qubit of blocks 0..w-1 and of block w+l
  PauliString x_all;           // X across block 0; flips every logical qubit
};

inline LogicalOps logical_ops(const CodeSpec& spec) {
  require_base_code(spec, "logical_ops");
  const int n = spec.base_qubits();
  LogicalOps ops;
  for (int ell = 0; ell < spec.K; ++ell) {
    std::vector<int> xs;
    for (int j = 0; j <= spec.w; ++j) xs.push_back(spec.block_start(spec.w + ell) + j);
    ops.x.push_back(pauli_from_support(n, Pauli::X, xs));

    std::vector<int> zs;
    for (int i = 0; i < spec.w; ++i) zs.push_back(spec.block_start(i));
    zs.push_back(spec.block_start(spec.w + ell));
    ops.z.push_back(pauli_from_support(n, Pauli::Z, zs));
  }
  std::vector<int> all;
  for (int j = 0; j <= spec.w; ++j) all.push_back(j);
  ops.x_all = pauli_from_support(n, Pauli::X, all);
  return ops;
}

// Hamming weight of the support, or nullopt when the state is not a
// constant-excitation state.
inline std::optional<int> excitation_number(const StateVector& state, double tol = 1e-12) {
  int m = -1;
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (std::abs(state.amps[i]) <= tol) continue;
    const int wt = __builtin_popcountll(i);
    if (m < 0) m = wt;
    else if (m != wt) return std::nullopt;
  }
  if (m < 0) return std::nullopt;
  return m;
}

}  // namespace adshor
