#pragma once
// Numerical certification: overlap matrices for the approximate
// error-correction conditions, residual scaling exponents, constant-
// excitation / collective-rotation immunity, fidelity sweeps with their
// fitted infidelity coefficients, the recovery-benefit threshold, and the
// static rate tables.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "adshor/channels.hpp"
#include "adshor/code.hpp"
#include "adshor/decoder.hpp"
#include "adshor/state.hpp"

namespace adshor {

// ---- overlap matrices -----------------------------------------------------

// M[i,j,k,l] = <i| A_k^dag A_l |j> over every damping pattern of weight
// <= w_max, with C[k,l] anchored to the i = j = 0 row.  The residual is
// the worst deviation from delta_ij C[k,l]; diag_spread quantifies how
// far the diagonal row actually is from being independent of i.
struct OverlapReport {
  CodeSpec spec;
  double gamma = 0.0;
  int w_max = 0;
  std::vector<ErrorString> errors;
  std::vector<cplx> m;  // [((i * D + j) * E + k) * E + l]
  std::vector<cplx> c;  // [k * E + l]
  double max_offdiag_ij = 0.0;  // step 1: max |M| over i != j
  double max_offdiag_kl = 0.0;  // step 2: max |M| over i == j, k != l
  double residual = 0.0;
  double diag_spread = 0.0;

  cplx M(std::uint64_t i, std::uint64_t j, std::size_t k, std::size_t l) const {
    const std::uint64_t D = dim_of(spec.K);
    const std::size_t E = errors.size();
    return m[((i * D + j) * E + k) * E + l];
  }
  cplx C(std::size_t k, std::size_t l) const { return c[k * errors.size() + l]; }
};

inline OverlapReport overlap_matrix(const CodeSpec& spec, double gamma, int w_max) {
  if (w_max > spec.w) throw std::invalid_argument("overlap_matrix: w_max exceeds code weight");
  OverlapReport rep;
  rep.spec = spec;
  rep.gamma = gamma;
  rep.w_max = w_max;
  rep.errors = error_strings_up_to(spec.qubits(), w_max);

  const std::uint64_t D = dim_of(spec.K);
  const std::size_t E = rep.errors.size();

  std::vector<StateVector> damped;  // [i * E + k] = A_k |i>
  damped.reserve(D * E);
  for (std::uint64_t i = 0; i < D; ++i) {
    const StateVector cw = codeword(spec, i);
    for (std::size_t k = 0; k < E; ++k)
      damped.push_back(apply_error_string(cw, rep.errors[k], gamma));
  }

  rep.m.resize(D * D * E * E);
  for (std::uint64_t i = 0; i < D; ++i)
    for (std::uint64_t j = 0; j < D; ++j)
      for (std::size_t k = 0; k < E; ++k)
        for (std::size_t l = 0; l < E; ++l)
          rep.m[((i * D + j) * E + k) * E + l] = inner(damped[i * E + k], damped[j * E + l]);

  rep.c.resize(E * E);
  for (std::size_t k = 0; k < E; ++k)
    for (std::size_t l = 0; l < E; ++l) rep.c[k * E + l] = rep.M(0, 0, k, l);

  for (std::uint64_t i = 0; i < D; ++i)
    for (std::uint64_t j = 0; j < D; ++j)
      for (std::size_t k = 0; k < E; ++k)
        for (std::size_t l = 0; l < E; ++l) {
          const cplx v = rep.M(i, j, k, l);
          if (i != j) rep.max_offdiag_ij = std::max(rep.max_offdiag_ij, std::abs(v));
          else if (k != l) rep.max_offdiag_kl = std::max(rep.max_offdiag_kl, std::abs(v));
          const cplx want = (i == j) ? rep.C(k, l) : cplx{0.0, 0.0};
          rep.residual = std::max(rep.residual, std::abs(v - want));
        }

  for (std::size_t k = 0; k < E; ++k) {
    double lo = 1e300, hi = -1e300;
    for (std::uint64_t i = 0; i < D; ++i) {
      const double v = rep.M(i, i, k, k).real();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    rep.diag_spread = std::max(rep.diag_spread, hi - lo);
  }
  return rep;
}

// ---- scaling fits -----------------------------------------------------------

struct ScalingFit {
  std::vector<double> gammas;
  std::vector<double> residuals;
  double slope = 0.0;
  double intercept = 0.0;
  bool degenerate = false;  // residuals at numerical zero everywhere
};

inline void fit_loglog(ScalingFit& fit) {
  const std::size_t n = fit.gammas.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const double x = std::log(fit.gammas[p]);
    const double y = std::log(fit.residuals[p]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
}

inline std::vector<double> default_gamma_grid() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

inline ScalingFit residual_scaling(const CodeSpec& spec,
                                   std::vector<double> grid = default_gamma_grid()) {
  if (grid.size() < 4) throw std::invalid_argument("residual_scaling: need >= 4 grid points");
  for (std::size_t p = 1; p < grid.size(); ++p)
    if (grid[p] >= grid[p - 1])
      throw std::invalid_argument("residual_scaling: grid must be strictly decreasing");
  ScalingFit fit;
  fit.gammas = std::move(grid);
  bool all_tiny = true;
  for (double g : fit.gammas) {
    const double r = overlap_matrix(spec, g, spec.w).residual;
    fit.residuals.push_back(r);
    if (r > 1e-13) all_tiny = false;
  }
  if (all_tiny) {
    fit.degenerate = true;  // exact within precision; no slope to fit
    return fit;
  }
  fit_loglog(fit);
  return fit;
}

// ---- constant-excitation certification --------------------------------------

struct CeCertification {
  CodeSpec spec;
  bool constant_excitation = false;
  int excitation = -1;
  std::vector<double> gdt_grid;
  double max_unit_deviation = 0.0;  // max | |<c|U|c>| - 1 |
  double max_phase_spread = 0.0;    // max |phase_i - phase_0| as chord distance
  ScalingFit residual_fit;

  bool pass(double tol = 1e-10) const {
    return constant_excitation && max_unit_deviation <= tol && max_phase_spread <= tol;
  }
};

inline std::vector<double> default_gdt_grid() { return {0.1, 0.7, 1.3, 2.9, 3.14159265358979}; }

inline CeCertification ce_certify(const CodeSpec& spec,
                                  std::vector<double> gdt_grid = default_gdt_grid(),
                                  double g = -1.0) {
  CeCertification cert;
  cert.spec = spec;
  cert.gdt_grid = std::move(gdt_grid);

  std::vector<StateVector> codewords;
  for (std::uint64_t i = 0; i < dim_of(spec.K); ++i) codewords.push_back(codeword(spec, i));

  cert.constant_excitation = true;
  int m = -1;
  for (const StateVector& cw : codewords) {
    const std::optional<int> e = excitation_number(cw);
    if (!e || (m >= 0 && *e != m)) {
      cert.constant_excitation = false;
      break;
    }
    m = *e;
  }
  cert.excitation = cert.constant_excitation ? m : -1;

  for (double gdt : cert.gdt_grid) {
    const double dt = gdt / g;
    cplx ref{0.0, 0.0};
    for (std::size_t i = 0; i < codewords.size(); ++i) {
      const cplx ov = inner(codewords[i], apply_cc(codewords[i], g, dt));
      cert.max_unit_deviation = std::max(cert.max_unit_deviation, std::abs(std::abs(ov) - 1.0));
      const cplx dir = ov / std::abs(ov);
      if (i == 0) ref = dir;
      else cert.max_phase_spread = std::max(cert.max_phase_spread, std::abs(dir - ref));
    }
  }
  cert.residual_fit = residual_scaling(spec);
  return cert;
}

// ---- fidelity sweeps --------------------------------------------------------

enum class DecoderBackend { Projector, Circuit };

struct SweepConfig {
  DecoderBackend backend = DecoderBackend::Projector;
  int rounds = 1;
  int cutoff = -1;  // default: the code weight w
  unsigned seed = 20250808;
  double max_tail = std::numeric_limits<double>::infinity();
  double g = -1.0;  // collective coupling
  double dt = 0.0;  // collective rotation time per round; 0 = damping only
};

struct FidelityPoint {
  double gamma = 0.0;
  double worst_case = 0.0;   // min total fidelity over the sampled logical inputs
  double floor_value = 0.0;  // sum over branches of the per-branch basis minimum
  double truncation_bound = 0.0;
  std::vector<double> input_fidelities;
};

struct FidelitySweep {
  CodeSpec spec;
  SweepConfig config;
  int cutoff = 0;
  std::vector<FidelityPoint> points;
};

namespace detail {

inline std::vector<std::vector<cplx>> fidelity_inputs(const CodeSpec& spec, unsigned seed) {
  const std::uint64_t D = dim_of(spec.K);
  std::vector<std::vector<cplx>> inputs;
  for (std::uint64_t i = 0; i < D; ++i) {
    std::vector<cplx> amps(D, cplx{0.0, 0.0});
    amps[i] = 1.0;
    inputs.push_back(std::move(amps));
  }
  const double r = 1.0 / std::sqrt(2.0);
  if (spec.K == 1) {
    inputs.push_back({cplx{r}, cplx{r}});
    inputs.push_back({cplx{r}, cplx{-r}});
    inputs.push_back({cplx{r}, cplx{0.0, r}});
    inputs.push_back({cplx{r}, cplx{0.0, -r}});
  } else {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < 20; ++s) {
      std::vector<cplx> amps(D);
      double n2 = 0.0;
      for (cplx& a : amps) {
        a = cplx{gauss(rng), gauss(rng)};
        n2 += std::norm(a);
      }
      const double inv = 1.0 / std::sqrt(n2);
      for (cplx& a : amps) a *= inv;
      inputs.push_back(std::move(amps));
    }
  }
  return inputs;
}

}  // namespace detail

// Worst-case fidelity over the 2^K basis states plus a Bloch sample (K=1)
// or 20 seeded Haar-random logical states (K>=2), after `rounds`
// applications of the channel with recovery each round.  Each round
// applies the collective rotation for cfg.dt (0 = damping only) followed
// by every damping branch up to the weight cutoff.  The floor_value
// column is the per-branch basis minimum
//     sum_k min_i |<i| R(A_k |i>)|^2,
// the quantity whose quadratic coefficient the infidelity claims are
// stated for; it is computed for rounds == 1 only.
//
// Branches above the weight cutoff count as lost; the binomial tail bound
// on that neglected mass is reported per point.  Callers needing an
// exactness contract set cfg.max_tail and get an error when the bound
// exceeds it.
inline FidelitySweep fidelity_sweep(const CodeSpec& spec, const std::vector<double>& grid,
                                    const SweepConfig& cfg = SweepConfig{}) {
  if (cfg.rounds < 1) throw std::invalid_argument("fidelity_sweep: rounds must be >= 1");
  if (cfg.backend == DecoderBackend::Circuit && (spec.w != 1 || spec.dual_rail))
    throw std::invalid_argument("fidelity_sweep: circuit backend covers w = 1 base codes");
  FidelitySweep sweep;
  sweep.spec = spec;
  sweep.config = cfg;
  sweep.cutoff = cfg.cutoff < 0 ? spec.w : cfg.cutoff;
  if (sweep.cutoff > spec.qubits())
    throw std::invalid_argument("fidelity_sweep: cutoff exceeds register size");

  const std::uint64_t D = dim_of(spec.K);
  const std::vector<std::vector<cplx>> inputs = detail::fidelity_inputs(spec, cfg.seed);
  const std::vector<ErrorString> errors = error_strings_up_to(spec.qubits(), sweep.cutoff);

  auto rotated = [&](const StateVector& s) {
    return cfg.dt == 0.0 ? s : apply_cc(s, cfg.g, cfg.dt);
  };

  for (double gamma : grid) {
    FidelityPoint pt;
    pt.gamma = gamma;
    pt.truncation_bound = truncation_tail_bound(spec.qubits(), gamma, sweep.cutoff);
    if (pt.truncation_bound > cfg.max_tail)
      throw std::domain_error("fidelity_sweep: truncation bound above the requested tail cap");

    ProjectorRecovery rec(spec, gamma, spec.w);

    // One recovered round of a single encoded branch state.
    auto recover_round = [&](const StateVector& enc_branch, std::vector<StateVector>& out) {
      const StateVector turned = rotated(enc_branch);
      for (const ErrorString& k : errors) {
        StateVector branch = apply_error_string(turned, k, gamma);
        if (branch.squared_norm() <= 1e-300) continue;
        out.push_back(k.weight() == 0 ? std::move(branch) : rec.transfer(branch));
      }
    };
    auto recover_round_circuit = [&](const StateVector& enc_branch,
                                     std::vector<StateVector>& out_logical) {
      const StateVector turned = rotated(enc_branch);
      for (const ErrorString& k : errors) {
        StateVector branch = apply_error_string(turned, k, gamma);
        if (branch.squared_norm() <= 1e-300) continue;
        for (RecoveredBranch& rb : circuit_recover(branch, spec, gamma).branches) {
          if (!rb.correctable) continue;
          out_logical.push_back(std::move(rb.logical));
        }
      }
    };
    auto reencode = [&](const StateVector& logical) {
      StateVector enc_branch(spec.qubits());
      for (std::uint64_t i = 0; i < D; ++i) {
        if (logical.amps[i] == cplx{0.0, 0.0}) continue;
        StateVector cw = codeword(spec, i);
        cw *= logical.amps[i];
        enc_branch += cw;
      }
      return enc_branch;
    };

    for (const std::vector<cplx>& amps : inputs) {
      const StateVector enc = encode(spec, amps);
      double total = 0.0;
      if (cfg.backend == DecoderBackend::Projector) {
        std::vector<StateVector> states{enc};
        for (int round = 0; round < cfg.rounds; ++round) {
          std::vector<StateVector> next;
          for (const StateVector& s : states) recover_round(s, next);
          states = std::move(next);
        }
        for (const StateVector& s : states) total += std::norm(inner(enc, s));
      } else {
        StateVector logical_in(spec.K);
        for (std::uint64_t i = 0; i < D; ++i) logical_in.amps[i] = amps[i];
        std::vector<StateVector> logical_states{logical_in};
        for (int round = 0; round < cfg.rounds; ++round) {
          std::vector<StateVector> next;
          for (const StateVector& L : logical_states) recover_round_circuit(reencode(L), next);
          logical_states = std::move(next);
        }
        for (const StateVector& L : logical_states) total += std::norm(inner(logical_in, L));
      }
      pt.input_fidelities.push_back(total);
      pt.worst_case = pt.input_fidelities.size() == 1 ? total : std::min(pt.worst_case, total);
    }

    if (cfg.rounds == 1) {
      for (const ErrorString& k : errors) {
        double least = 1e300;
        for (std::uint64_t i = 0; i < D; ++i) {
          const StateVector enc = codeword(spec, i);
          double f = 0.0;
          if (cfg.backend == DecoderBackend::Projector) {
            const StateVector branch = apply_error_string(rotated(enc), k, gamma);
            const StateVector recovered = k.weight() == 0 ? branch : rec.transfer(branch);
            f = std::norm(inner(enc, recovered));
          } else {
            StateVector branch = apply_error_string(rotated(enc), k, gamma);
            if (branch.squared_norm() > 1e-300) {
              const StateVector target = StateVector::basis(spec.K, i);
              for (const RecoveredBranch& rb : circuit_recover(branch, spec, gamma).branches)
                if (rb.correctable) f += std::norm(inner(target, rb.logical));
            }
          }
          least = std::min(least, f);
        }
        pt.floor_value += least;
      }
    }
    sweep.points.push_back(std::move(pt));
  }
  return sweep;
}

inline FidelitySweep fidelity_sweep(const CodeSpec& spec, const std::vector<double>& grid,
                                    DecoderBackend backend, int rounds = 1) {
  SweepConfig cfg;
  cfg.backend = backend;
  cfg.rounds = rounds;
  return fidelity_sweep(spec, grid, cfg);
}

struct InfidelityFit {
  double quad_constrained = 0.0;  // model c2 g^2
  double lin_free = 0.0;          // model c1 g + c2 g^2
  double quad_free = 0.0;
};

inline InfidelityFit fit_infidelity(const std::vector<double>& gammas,
                                    const std::vector<double>& infidelities) {
  if (gammas.size() != infidelities.size() || gammas.size() < 2)
    throw std::invalid_argument("fit_infidelity: need matching series, >= 2 points");
  InfidelityFit fit;
  double s4 = 0, s2d = 0;
  for (std::size_t p = 0; p < gammas.size(); ++p) {
    const double g = gammas[p];
    s4 += g * g * g * g;
    s2d += g * g * infidelities[p];
  }
  fit.quad_constrained = s2d / s4;

  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (std::size_t p = 0; p < gammas.size(); ++p) {
    const double g = gammas[p], d = infidelities[p];
    a11 += g * g;
    a12 += g * g * g;
    a22 += g * g * g * g;
    b1 += g * d;
    b2 += g * g * d;
  }
  const double det = a11 * a22 - a12 * a12;
  fit.lin_free = (b1 * a22 - a12 * b2) / det;
  fit.quad_free = (a11 * b2 - a12 * b1) / det;
  return fit;
}

// ---- recovery-benefit threshold ---------------------------------------------

struct ThresholdResult {
  double gamma = 0.0;
  double closed_form = 0.0;
  double numeric_crossing = 0.0;
};

// Corrected-vs-raw fidelity margin after T rounds at transmissivity
// (1-gamma)^T; positive while correction still helps.
inline double threshold_margin(double gamma, double rounds) {
  const double eta = std::pow(1.0 - gamma, rounds);
  return eta * eta + 2.0 * (1.0 - eta) * eta * eta * eta - eta;
}

inline ThresholdResult threshold_rounds(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("threshold_rounds: gamma must lie in (0, 1)");
  ThresholdResult res;
  res.gamma = gamma;
  res.closed_form = -std::log(2.0) / (2.0 * std::log(1.0 - gamma));

  double lo = 1e-9;
  double hi = 1.0;
  while (threshold_margin(gamma, hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("threshold_rounds: no crossing found");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (threshold_margin(gamma, mid) > 0.0 ? lo : hi) = mid;
  }
  res.numeric_crossing = 0.5 * (lo + hi);
  return res;
}

// ---- rate tables --------------------------------------------------------------

struct RateFormulaRow {
  std::string family;
  std::string correction_weight;
  std::string rate;
};

struct RatePairRow {
  int w = 0;
  int K = 0;
  int n_this = 0;       // (w+1)(w+K)
  int n_reference = 0;  // dual-rail construction from optimal stabilizer codes
  double rate = 0.0;
  bool fewer_qubits = false;  // strictly fewer than the reference
};

struct RateTables {
  std::vector<RateFormulaRow> formulas;
  std::vector<RatePairRow> pairs;
};

inline RateTables rate_tables() {
  RateTables t;
  t.formulas = {
      {"[[4,1]]", "1", "1/4"},
      {"[[2(K+1),K]]", "1", "K/(2(K+1))"},
      {"[[(w+1)^2,1]]", "w", "1/(w+1)^2"},
      {"[[(w+1)(w+K),K]]", "w", "K/((w+1)(w+K))"},
  };
  static const int reference[3][6] = {
      {8, 8, 12, 12, 16, 16}, {10, 16, 16, 20, 22, 24}, {20, 20, 24, 24, 28, 28}};
  for (int w = 1; w <= 3; ++w)
    for (int K = 1; K <= 6; ++K) {
      RatePairRow row;
      row.w = w;
      row.K = K;
      row.n_this = (w + 1) * (w + K);
      row.n_reference = reference[w - 1][K - 1];
      row.rate = static_cast<double>(K) / row.n_this;
      row.fewer_qubits = row.n_this < row.n_reference;
      t.pairs.push_back(row);
    }
  return t;
}

}  // namespace adshor
