#include <doctest.h>

#include <random>

#include "adshor/verify.hpp"
#include "oracle.hpp"

using namespace adshor;

TEST_CASE("overlap matrix: exact zeros and frozen diagonal values") {
  const double gamma = 0.1;
  SUBCASE("four-qubit code: cross-codeword entries vanish") {
    const OverlapReport rep = overlap_matrix(CodeSpec(1, 1), gamma, 1);
    CHECK(rep.max_offdiag_ij < 1e-14);
    CHECK(rep.max_offdiag_kl < 1e-14);
  }
  SUBCASE("six-qubit code: frozen constants") {
    const OverlapReport rep = overlap_matrix(CodeSpec(1, 2), gamma, 1);
    const std::size_t k0 = 0;  // trivial pattern sorts first
    CHECK(rep.errors[k0].weight() == 0);
    CHECK(std::abs(rep.C(k0, k0) - cplx{(1.0 + std::pow(1.0 - gamma, 6)) / 2.0}) < 1e-12);
    const cplx diag01 = rep.M(0b01, 0b01, k0, k0);
    CHECK(std::abs(diag01 -
                   cplx{(std::pow(1.0 - gamma, 2) + std::pow(1.0 - gamma, 4)) / 2.0}) < 1e-12);
    const double want_res = (1.0 + std::pow(1.0 - gamma, 6) - std::pow(1.0 - gamma, 2) -
                             std::pow(1.0 - gamma, 4)) /
                            2.0;
    CHECK(std::abs(diag01 - rep.C(k0, k0)) == doctest::Approx(want_res).epsilon(1e-10));
    CHECK(rep.residual >= want_res - 1e-14);
  }
  SUBCASE("six-qubit code: exhaustive 42-pair distinct-pattern check") {
    const OverlapReport rep = overlap_matrix(CodeSpec(1, 2), gamma, 1);
    REQUIRE(rep.errors.size() == 7);
    int pairs = 0;
    for (std::uint64_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 7; ++k)
        for (std::size_t l = 0; l < 7; ++l) {
          if (k == l) continue;
          if (i == 0) ++pairs;
          CHECK(std::abs(rep.M(i, i, k, l)) < 1e-12);
        }
    CHECK(pairs == 42);
  }
}

TEST_CASE("overlap matrix is Hermitian under the simultaneous conjugate swap") {
  const OverlapReport rep = overlap_matrix(CodeSpec(1, 2), 0.13, 1);
  const std::size_t E = rep.errors.size();
  for (std::uint64_t i = 0; i < 4; ++i)
    for (std::uint64_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < E; ++k)
        for (std::size_t l = 0; l < E; ++l)
          CHECK(std::abs(rep.M(i, j, k, l) - std::conj(rep.M(j, i, l, k))) < 1e-14);
}

TEST_CASE("diagonal spread quantifies the anchor-row dependence on the logical index") {
  const double gamma = 0.1;
  const OverlapReport rep = overlap_matrix(CodeSpec(1, 2), gamma, 1);
  double want = 0.0;
  for (std::size_t k = 0; k < rep.errors.size(); ++k) {
    double lo = 1e300, hi = -1e300;
    for (std::uint64_t i = 0; i < 4; ++i) {
      lo = std::min(lo, rep.M(i, i, k, k).real());
      hi = std::max(hi, rep.M(i, i, k, k).real());
    }
    want = std::max(want, hi - lo);
  }
  CHECK(rep.diag_spread == doctest::Approx(want).epsilon(1e-12));
  CHECK(rep.diag_spread > 1e-4);  // genuinely quadratic, not zero
  CHECK(rep.diag_spread < 10.0 * gamma * gamma);
}

TEST_CASE("squared damping strings factor into the displayed per-qubit form") {
  // Route A: library states.  Route B: dense tensor product of
  // I/2 + (-1)^{k_j} (I/2 - gamma |1><1|) per qubit.
  std::mt19937 rng(103);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 4;
  for (int trial = 0; trial < 10; ++trial) {
    const double gamma = unit(rng);
    const ErrorString k(rng() % dim_of(n), n);
    oracle::Mat prod(1);
    prod.at(0, 0) = 1.0;
    for (int q = 0; q < n; ++q) {
      const double sign = k.damps(q) ? -1.0 : 1.0;
      oracle::Mat factor(2);
      factor.at(0, 0) = 0.5 + sign * 0.5;
      factor.at(1, 1) = 0.5 + sign * (0.5 - gamma);
      prod = oracle::kron(prod, factor);
    }
    const StateVector x = oracle::random_state(n, rng);
    const StateVector y = oracle::random_state(n, rng);
    const cplx route_a =
        inner(apply_error_string(x, k, gamma), apply_error_string(y, k, gamma));
    const cplx route_b = inner(x, oracle::apply_mat(prod, y));
    CHECK(std::abs(route_a - route_b) < 1e-13);
  }
}

TEST_CASE("blockwise factorization of the diagonal overlaps for K = 1") {
  // <i| A_k^dag A_k |i> = 2^-w * sum over block values with the parity of
  // i of the per-block factors alpha(a_j).
  std::mt19937 rng(107);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const CodeSpec& spec : {CodeSpec(1, 1), CodeSpec(2, 1)}) {
    const double gamma = 0.05 + 0.5 * unit(rng);
    for (const ErrorString& k : error_strings_up_to(spec.base_qubits(), spec.w)) {
      auto alpha = [&](int block, int value) {
        double f = 1.0;
        for (int j = 0; j < spec.block_len(); ++j) {
          const int q = spec.block_start(block) + j;
          if (value == 0) f *= k.damps(q) ? 0.0 : 1.0;
          else f *= k.damps(q) ? gamma : 1.0 - gamma;
        }
        return f;
      };
      for (std::uint64_t i = 0; i < 2; ++i) {
        double sum = 0.0;
        const int blocks = spec.blocks();
        for (std::uint64_t a = 0; a < dim_of(blocks); ++a) {
          if ((__builtin_popcountll(a) & 1) != static_cast<int>(i)) continue;
          double prod = 1.0;
          for (int b = 0; b < blocks; ++b)
            prod *= alpha(b, static_cast<int>((a >> (blocks - 1 - b)) & 1u));
          sum += prod;
        }
        sum /= static_cast<double>(dim_of(spec.w));
        const StateVector cw = codeword(spec, i);
        const StateVector branch = apply_error_string(cw, k, gamma);
        CHECK(std::abs(branch.squared_norm() - sum) < 1e-12);
      }
    }
  }
}

TEST_CASE("residual scaling exponents for weight-1 and the symmetric weight-2 code") {
  const ScalingFit f11 = residual_scaling(CodeSpec(1, 1));
  CHECK_FALSE(f11.degenerate);
  CHECK(f11.slope == doctest::Approx(2.0).epsilon(0.075));

  const ScalingFit f12 = residual_scaling(CodeSpec(1, 2));
  CHECK(f12.slope == doctest::Approx(2.0).epsilon(0.075));

  const ScalingFit f21 = residual_scaling(CodeSpec(2, 1));
  CHECK(f21.slope == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("cross-logical-block dampings cap the (2,2) residual exponent at two") {
  // One damping in each of the two logical blocks annihilates half the
  // codewords while the anchor row keeps weight gamma^2 (1-gamma)^7 / 2,
  // so the worst residual scales quadratically, not cubically.
  const double gamma = 1e-3;
  const OverlapReport rep = overlap_matrix(CodeSpec(2, 2), gamma, 2);
  const double floor22 = gamma * gamma * std::pow(1.0 - gamma, 7) / 2.0;
  CHECK(rep.residual >= floor22 - 1e-15);

  const ScalingFit f22 = residual_scaling(CodeSpec(2, 2));
  CHECK(f22.slope == doctest::Approx(2.0).epsilon(0.075));

  // independent dense route: twelve-qubit codewords assembled directly
  // from their four block patterns, squared damping operator from the
  // per-qubit product form, for the damping hitting qubits 6 and 9
  auto pattern = [](int b0, int b1, int b2, int b3) {
    std::uint64_t idx = 0;
    for (int b : {b0, b1, b2, b3})
      for (int j = 0; j < 3; ++j) idx = (idx << 1) | b;
    return idx;
  };
  auto build = [&](int l0, int l1) {
    StateVector s(12);
    s.amps[pattern(0, 0, l0, l1)] += 0.5;
    s.amps[pattern(1, 1, l0, l1)] += 0.5;
    s.amps[pattern(0, 1, 1 - l0, 1 - l1)] += 0.5;
    s.amps[pattern(1, 0, 1 - l0, 1 - l1)] += 0.5;
    return s;
  };
  auto squared_overlap = [&](const StateVector& s) {
    // diag factor per qubit: (1, 1-gamma) undamped, (0, gamma) damped
    double acc = 0.0;
    for (std::uint64_t idx = 0; idx < s.dim(); ++idx) {
      if (s.amps[idx] == cplx{0.0, 0.0}) continue;
      double f = 1.0;
      for (int q = 0; q < 12; ++q) {
        const bool one = bit_at(idx, 12, q);
        if (q == 6 || q == 9) f *= one ? gamma : 0.0;
        else f *= one ? 1.0 - gamma : 1.0;
      }
      acc += f * std::norm(s.amps[idx]);
    }
    return acc;
  };
  const double c_anchor = squared_overlap(build(0, 0));
  CHECK(c_anchor == doctest::Approx(gamma * gamma * std::pow(1.0 - gamma, 7) / 2.0)
                        .epsilon(1e-12));
  CHECK(squared_overlap(build(0, 1)) == 0.0);
  CHECK(squared_overlap(build(1, 0)) == 0.0);
}

TEST_CASE("constant-excitation certification") {
  SUBCASE("dual-rail four-qubit code") {
    const CeCertification cert = ce_certify(CodeSpec(1, 1, true));
    CHECK(cert.constant_excitation);
    CHECK(cert.excitation == 4);
    CHECK(cert.max_unit_deviation < 1e-10);
    CHECK(cert.max_phase_spread < 1e-10);
    CHECK(cert.pass());
    // dual-rail branch norms are uniform across codewords, so the overlap
    // residuals sit at numerical zero and the fit reports exactness
    CHECK(cert.residual_fit.degenerate);
    for (double r : cert.residual_fit.residuals) CHECK(r <= 1e-13);
  }
  SUBCASE("dual-rail six-qubit code") {
    const CeCertification cert = ce_certify(CodeSpec(1, 2, true));
    CHECK(cert.pass());
    CHECK(cert.excitation == 6);
    CHECK(cert.residual_fit.degenerate);
  }
  SUBCASE("bare code fails as the negative control") {
    const CeCertification cert = ce_certify(CodeSpec(1, 1, false));
    CHECK_FALSE(cert.constant_excitation);
    CHECK_FALSE(cert.pass());
  }
}

TEST_CASE("fidelity sweep floors match the closed worst-branch forms") {
  SUBCASE("four-qubit code") {
    const FidelitySweep sweep =
        fidelity_sweep(CodeSpec(1, 1), {0.1, 0.01}, DecoderBackend::Projector);
    for (const FidelityPoint& pt : sweep.points) {
      const double g = pt.gamma;
      const double want = std::pow(1.0 - g, 2) + 2.0 * g * std::pow(1.0 - g, 3);
      CHECK(pt.floor_value == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("dual-rail eight-qubit code") {
    const FidelitySweep sweep =
        fidelity_sweep(CodeSpec(1, 1, true), {0.1, 0.01}, DecoderBackend::Projector);
    for (const FidelityPoint& pt : sweep.points) {
      const double g = pt.gamma;
      const double want = std::pow(1.0 - g, 4) + 4.0 * g * std::pow(1.0 - g, 3);
      CHECK(pt.floor_value == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("gate backend floor agrees with the projector floor on the four-qubit code") {
    const FidelitySweep proj =
        fidelity_sweep(CodeSpec(1, 1), {0.05}, DecoderBackend::Projector);
    const FidelitySweep circ = fidelity_sweep(CodeSpec(1, 1), {0.05}, DecoderBackend::Circuit);
    CHECK(proj.points[0].floor_value ==
          doctest::Approx(circ.points[0].floor_value).epsilon(1e-12));
  }
}

TEST_CASE("fitted infidelity coefficients") {
  const std::vector<double> grid{1e-2, 3e-3, 1e-3};
  SUBCASE("four-qubit code: quadratic coefficient near five") {
    const FidelitySweep sweep = fidelity_sweep(CodeSpec(1, 1), grid, DecoderBackend::Projector);
    std::vector<double> infid;
    for (const FidelityPoint& pt : sweep.points) infid.push_back(1.0 - pt.floor_value);
    const InfidelityFit fit = fit_infidelity(grid, infid);
    CHECK(fit.quad_constrained == doctest::Approx(5.0).epsilon(0.10));
    CHECK(std::abs(fit.lin_free) <= 1e-3 * fit.quad_constrained);
  }
  SUBCASE("dual-rail eight-qubit code: quadratic coefficient near six") {
    const FidelitySweep sweep =
        fidelity_sweep(CodeSpec(1, 1, true), grid, DecoderBackend::Projector);
    std::vector<double> infid;
    for (const FidelityPoint& pt : sweep.points) infid.push_back(1.0 - pt.floor_value);
    const InfidelityFit fit = fit_infidelity(grid, infid);
    CHECK(fit.quad_constrained == doctest::Approx(6.0).epsilon(0.10));
    CHECK(std::abs(fit.lin_free) <= 1e-3 * fit.quad_constrained);
  }
}

TEST_CASE("worst-case fidelity stays within a quadratic band of the floor") {
  for (double gamma : {1e-2, 3e-3}) {
    const FidelitySweep sweep =
        fidelity_sweep(CodeSpec(1, 1), {gamma}, DecoderBackend::Projector);
    const FidelityPoint& pt = sweep.points[0];
    CHECK(pt.worst_case >= pt.floor_value - 1e-12);
    CHECK(std::abs(pt.worst_case - pt.floor_value) <= 2.0 * gamma * gamma);
    CHECK(pt.input_fidelities.size() == 6);  // basis plus four Bloch directions
  }
}

TEST_CASE("collective rotation leaves the dual-rail sweep untouched, degrades the bare one") {
  const double gamma = 0.02;
  SweepConfig plain;
  SweepConfig rotated;
  rotated.dt = 1.3;

  const FidelitySweep dr_plain = fidelity_sweep(CodeSpec(1, 1, true), {gamma}, plain);
  const FidelitySweep dr_rot = fidelity_sweep(CodeSpec(1, 1, true), {gamma}, rotated);
  CHECK(std::abs(dr_plain.points[0].worst_case - dr_rot.points[0].worst_case) < 1e-12);
  CHECK(std::abs(dr_plain.points[0].floor_value - dr_rot.points[0].floor_value) < 1e-12);

  const FidelitySweep bare_plain = fidelity_sweep(CodeSpec(1, 1), {gamma}, plain);
  const FidelitySweep bare_rot = fidelity_sweep(CodeSpec(1, 1), {gamma}, rotated);
  CHECK(bare_rot.points[0].worst_case < bare_plain.points[0].worst_case - 0.01);
}

TEST_CASE("two-logical sweep samples the basis plus twenty random logical states") {
  const FidelitySweep sweep = fidelity_sweep(CodeSpec(1, 2), {0.01}, DecoderBackend::Projector);
  CHECK(sweep.points[0].input_fidelities.size() == 24);
  double best_basis = 1e300;
  for (int i = 0; i < 4; ++i)
    best_basis = std::min(best_basis, sweep.points[0].input_fidelities[i]);
  CHECK(sweep.points[0].worst_case <= best_basis + 1e-15);
}

TEST_CASE("ensemble recovery wrapper reports branch states and fidelity") {
  const CodeSpec spec(1, 1);
  const double gamma = 0.04;
  const StateVector enc = codeword(spec, 1);
  const ProjectorRecovery rec(spec, gamma);
  const EnsembleRecovery out = projector_recover(rec, ad_branches(enc, gamma, 1), enc);
  REQUIRE(out.recovered.size() == 5);
  // trivial branch untouched, damped branches transferred into the codespace
  CHECK(out.recovered[0].a.weight() == 0);
  for (std::size_t b = 1; b < out.recovered.size(); ++b) {
    const LogicalDecomposition dec = decode_logical(out.recovered[b].state, spec);
    CHECK(dec.leakage < 1e-15);
  }
  const double want =
      std::pow(1.0 - gamma, 2) + 4.0 * gamma * (1.0 - gamma) / 2.0;  // basis input i = 1
  CHECK(out.fidelity == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("undamped sweep point is exactly one") {
  const FidelitySweep sweep = fidelity_sweep(CodeSpec(1, 1), {0.0}, DecoderBackend::Projector);
  CHECK(sweep.points[0].worst_case == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sweep.points[0].floor_value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("multi-round sweep degrades monotonically") {
  const FidelitySweep one = fidelity_sweep(CodeSpec(1, 1), {0.02}, DecoderBackend::Projector, 1);
  const FidelitySweep two = fidelity_sweep(CodeSpec(1, 1), {0.02}, DecoderBackend::Projector, 2);
  CHECK(two.points[0].worst_case < one.points[0].worst_case);
  CHECK(two.points[0].worst_case > 0.9);
}

TEST_CASE("threshold rounds: closed form, crossing and asymptote") {
  SUBCASE("frozen point at gamma = 1 - 1/e") {
    const ThresholdResult res = threshold_rounds(1.0 - std::exp(-1.0));
    CHECK(res.closed_form == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-12));
  }
  SUBCASE("closed form equals the numeric crossing") {
    for (double gamma : {0.01, 0.05, 0.1}) {
      const ThresholdResult res = threshold_rounds(gamma);
      CHECK(std::abs(res.numeric_crossing - res.closed_form) <=
            0.05 * res.closed_form);
      CHECK(std::abs(res.numeric_crossing - res.closed_form) < 1e-6 * res.closed_form);
    }
  }
  SUBCASE("small-rate asymptote ln2 / (2 gamma)") {
    const double gamma = 1e-4;
    const ThresholdResult res = threshold_rounds(gamma);
    CHECK(res.closed_form ==
          doctest::Approx(std::log(2.0) / (2.0 * gamma)).epsilon(1e-3));
  }
  SUBCASE("accumulated-rate margin ties back to the sweep floor") {
    // T channel uses before one recovery act like a single channel at
    // rate 1 - (1-gamma)^T, so the margin is floor(gamma_eff) minus the
    // raw transmissivity.
    const double gamma = 0.03, rounds = 4.0;
    const double eta = std::pow(1.0 - gamma, rounds);
    const FidelitySweep sweep =
        fidelity_sweep(CodeSpec(1, 1), {1.0 - eta}, DecoderBackend::Projector);
    CHECK(threshold_margin(gamma, rounds) ==
          doctest::Approx(sweep.points[0].floor_value - eta).epsilon(1e-12));
  }
  SUBCASE("domain guard") {
    CHECK_THROWS_AS((void)threshold_rounds(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)threshold_rounds(1.0), std::invalid_argument);
  }
}

TEST_CASE("rate tables: qubit counts, flags and limits") {
  const RateTables tables = rate_tables();
  REQUIRE(tables.pairs.size() == 18);
  REQUIRE(tables.formulas.size() == 4);

  int fewer = 0;
  for (const RatePairRow& row : tables.pairs) {
    CHECK(row.n_this == (row.w + 1) * (row.w + row.K));
    CHECK(row.rate == doctest::Approx(static_cast<double>(row.K) / row.n_this));
    fewer += row.fewer_qubits;
  }
  CHECK(fewer == 12);

  auto find = [&](int w, int K) {
    for (const RatePairRow& row : tables.pairs)
      if (row.w == w && row.K == K) return row;
    FAIL("missing rate row");
    return tables.pairs[0];
  };
  CHECK(find(1, 1).n_this == 4);
  CHECK(find(1, 1).n_reference == 8);
  CHECK(find(1, 1).fewer_qubits);
  CHECK(find(2, 6).n_this == 24);
  CHECK(find(2, 6).n_reference == 24);
  CHECK_FALSE(find(2, 6).fewer_qubits);
  CHECK(find(3, 4).n_this == 28);
  CHECK(find(3, 4).n_reference == 24);
  CHECK_FALSE(find(3, 4).fewer_qubits);

  // asymptotic rate of the w = 1 family approaches 1/2
  const double far = 1.0e6 / (2.0 * (1.0e6 + 1.0));
  CHECK(std::abs(far - 0.5) < 1e-5);
  CHECK(CodeSpec(1, 1000).rate() == doctest::Approx(1000.0 / 2002.0));
}

TEST_CASE("scaling fit handles degenerate residuals") {
  ScalingFit fit;
  fit.gammas = {1e-1, 1e-2, 1e-3, 1e-4};
  fit.residuals = {1e-2, 1e-4, 1e-6, 1e-8};
  fit_loglog(fit);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS((void)residual_scaling(CodeSpec(1, 1), {0.1, 0.2, 0.3, 0.4}),
                  std::invalid_argument);
}
