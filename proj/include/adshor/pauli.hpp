#pragma once
// Sparse signed Pauli operators, used for stabilizer generators and
// logical operators.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adshor/state.hpp"

namespace adshor {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

struct PauliString {
  int n_qubits = 0;
  std::vector<Pauli> letters;
  cplx phase{1.0, 0.0};  // one of {1, -1, i, -i}

  PauliString() = default;
  explicit PauliString(int n) : n_qubits(n), letters(n, Pauli::I) {
    if (n < 1) throw std::invalid_argument("PauliString: n_qubits must be >= 1");
  }

  PauliString& set(int qubit, Pauli p) {
    if (qubit < 0 || qubit >= n_qubits) throw std::out_of_range("PauliString::set: qubit");
    letters[qubit] = p;
    return *this;
  }

  Pauli at(int qubit) const { return letters[qubit]; }

  int weight() const {
    int w = 0;
    for (Pauli p : letters) w += (p != Pauli::I);
    return w;
  }

  // Two Pauli strings commute iff they collide on an even number of qubits.
  bool commutes_with(const PauliString& other) const {
    if (other.n_qubits != n_qubits)
      throw std::invalid_argument("PauliString::commutes_with: size mismatch");
    int collisions = 0;
    for (int q = 0; q < n_qubits; ++q) {
      const Pauli a = letters[q], b = other.letters[q];
      if (a != Pauli::I && b != Pauli::I && a != b) ++collisions;
    }
    return (collisions % 2) == 0;
  }

  PauliString operator*(const PauliString& other) const {
    if (other.n_qubits != n_qubits) throw std::invalid_argument("PauliString::operator*: size");
    PauliString out(n_qubits);
    out.phase = phase * other.phase;
    for (int q = 0; q < n_qubits; ++q) {
      const int a = static_cast<int>(letters[q]), b = static_cast<int>(other.letters[q]);
      if (a == 0) {
        out.letters[q] = other.letters[q];
      } else if (b == 0 || a == b) {
        out.letters[q] = (a == b) ? Pauli::I : letters[q];
      } else {
        // XY=iZ, YZ=iX, ZX=iY and the reversed orders pick up -i.
        const int c = 6 - a - b;
        out.letters[q] = static_cast<Pauli>(c);
        const bool forward = (b - a + 3) % 3 == 1;
        out.phase *= forward ? cplx{0.0, 1.0} : cplx{0.0, -1.0};
      }
    }
    return out;
  }

  std::string str() const {
    std::string s;
    if (phase == cplx{-1.0, 0.0}) s += "-";
    else if (phase == cplx{0.0, 1.0}) s += "i";
    else if (phase == cplx{0.0, -1.0}) s += "-i";
    bool any = false;
    for (int q = 0; q < n_qubits; ++q) {
      if (letters[q] == Pauli::I) continue;
      s += pauli_char(letters[q]);
      s += std::to_string(q);
      any = true;
    }
    if (!any) s += "I";
    return s;
  }
};

inline PauliString pauli_from_support(int n, Pauli p, const std::vector<int>& qubits) {
  PauliString s(n);
  for (int q : qubits) s.set(q, p);
  return s;
}

inline StateVector apply(const PauliString& p, const StateVector& state) {
  if (p.n_qubits != state.n_qubits) throw std::invalid_argument("apply: qubit count mismatch");
  const int n = state.n_qubits;
  std::uint64_t xmask = 0;
  std::uint64_t zmask = 0;  // qubits contributing (-1)^bit
  int y_count = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << bit_shift(n, q);
    switch (p.letters[q]) {
      case Pauli::I: break;
      case Pauli::X: xmask |= bit; break;
      case Pauli::Z: zmask |= bit; break;
      case Pauli::Y: xmask |= bit; zmask |= bit; ++y_count; break;
    }
  }
  // Y|b> = i(-1)^b |1-b>, so each Y contributes a global i on top of the
  // X flip and Z sign taken at the input bit.
  cplx y_phase{1.0, 0.0};
  for (int j = 0; j < y_count; ++j) y_phase *= cplx{0.0, 1.0};

  StateVector out(n);
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (state.amps[i] == cplx{0.0, 0.0}) continue;
    const int sign = (std::uint64_t)__builtin_popcountll(i & zmask) % 2 == 0 ? 1 : -1;
    out.amps[i ^ xmask] = p.phase * y_phase * static_cast<double>(sign) * state.amps[i];
  }
  return out;
}

inline LocalOperator to_operator(const PauliString& p) {
  std::vector<int> support;
  for (int q = 0; q < p.n_qubits; ++q)
    if (p.letters[q] != Pauli::I) support.push_back(q);
  if (support.empty()) support.push_back(0);
  const int arity = static_cast<int>(support.size());
  if (arity > 12) throw std::invalid_argument("to_operator: support too large for dense form");

  const std::uint64_t d = dim_of(arity);
  std::vector<cplx> m(d * d, cplx{0.0, 0.0});
  for (std::uint64_t col = 0; col < d; ++col) {
    std::uint64_t row = col;
    cplx coeff = p.phase;
    for (int j = 0; j < arity; ++j) {
      const int b = static_cast<int>((col >> (arity - 1 - j)) & 1u);
      const std::uint64_t bit = std::uint64_t{1} << (arity - 1 - j);
      switch (p.letters[support[j]]) {
        case Pauli::I: break;
        case Pauli::X: row ^= bit; break;
        case Pauli::Z: coeff *= (b ? -1.0 : 1.0); break;
        case Pauli::Y: row ^= bit; coeff *= cplx{0.0, 1.0} * (b ? -1.0 : 1.0); break;
      }
    }
    m[row * d + col] += coeff;
  }
  return LocalOperator(arity, std::move(m), support);
}

// Rank of the set over GF(2) in the symplectic (x|z) representation,
// ignoring phases.
inline int gf2_rank(const std::vector<PauliString>& set) {
  if (set.empty()) return 0;
  const int n = set[0].n_qubits;
  if (2 * n > 64) throw std::invalid_argument("gf2_rank: register too large");
  std::vector<std::uint64_t> rows;
  rows.reserve(set.size());
  for (const PauliString& p : set) {
    std::uint64_t r = 0;
    for (int q = 0; q < n; ++q) {
      const Pauli l = p.letters[q];
      if (l == Pauli::X || l == Pauli::Y) r |= std::uint64_t{1} << q;
      if (l == Pauli::Z || l == Pauli::Y) r |= std::uint64_t{1} << (n + q);
    }
    rows.push_back(r);
  }
  int rank = 0;
  for (int bit = 0; bit < 2 * n; ++bit) {
    const std::uint64_t mask = std::uint64_t{1} << bit;
    std::size_t pivot = rank;
    while (pivot < rows.size() && !(rows[pivot] & mask)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != static_cast<std::size_t>(rank) && (rows[r] & mask)) rows[r] ^= rows[rank];
    ++rank;
  }
  return rank;
}

// True iff candidate lies in the GF(2) span of the given generators.
inline bool in_gf2_span(const PauliString& candidate, const std::vector<PauliString>& gens) {
  std::vector<PauliString> with = gens;
  with.push_back(candidate);
  return gf2_rank(with) == gf2_rank(gens);
}

}  // namespace adshor
