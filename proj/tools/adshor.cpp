// Command-line front end: construct codes, run channels, decode, verify,
// sweep, and emit every report as machine-diffable JSON/CSV.
//
// Output is deterministic for a fixed configuration and seed.  The exit
// code is 0 iff every asserted check passed; on failure a machine-readable
// trailer {"failures": [...]} is printed as the last line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adshor/channels.hpp"
#include "adshor/code.hpp"
#include "adshor/decoder.hpp"
#include "adshor/io.hpp"
#include "adshor/verify.hpp"

using namespace adshor;

namespace {

struct Output {
  std::string path;  // empty = stdout
  std::string text;
  std::vector<std::string> failures;

  void emit() {
    if (!failures.empty()) {
      ordered_json trailer;
      trailer["failures"] = failures;
      if (!text.empty() && text.back() != '\n') text += '\n';
      text += trailer.dump();
      text += '\n';
    }
    if (path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(path, std::ios::binary);
      out << text;
    }
  }
};

int max_qubit_guard() {
  if (const char* env = std::getenv("ADSHOR_MAX_QUBITS")) return std::atoi(env);
  return 20;
}

bool guard_qubits(const CodeSpec& spec, Output& out) {
  if (spec.qubits() > max_qubit_guard()) {
    out.failures.push_back("qubit count " + std::to_string(spec.qubits()) +
                           " exceeds the guard; set ADSHOR_MAX_QUBITS to override");
    return false;
  }
  if (spec.qubits() > 26) {
    out.failures.push_back("qubit count exceeds the hard register limit of 26");
    return false;
  }
  return true;
}

ordered_json scaling_to_json(const ScalingFit& fit) {
  ordered_json j;
  j["gammas"] = ordered_json::array();
  j["residuals"] = ordered_json::array();
  for (double g : fit.gammas) j["gammas"].push_back(json_number(g));
  for (double r : fit.residuals) j["residuals"].push_back(json_number(r));
  j["slope"] = json_number(fit.slope);
  j["intercept"] = json_number(fit.intercept);
  j["degenerate"] = fit.degenerate;
  return j;
}

int run_codewords(const CodeSpec& spec, Output& out) {
  if (!guard_qubits(spec, out)) return 1;
  ordered_json j = ordered_json::array();
  for (std::uint64_t i = 0; i < dim_of(spec.K); ++i)
    j.push_back(codeword_to_json(spec, i, codeword(spec, i)));
  out.text = j.dump(2) + "\n";
  return 0;
}

int run_stabilizers(const CodeSpec& spec, Output& out) {
  if (!guard_qubits(spec, out)) return 1;
  ordered_json j;
  j["spec"] = spec_to_json(spec);
  j["z"] = ordered_json::array();
  for (const PauliString& p : z_stabilizers(spec)) j["z"].push_back(p.str());
  j["x"] = ordered_json::array();
  for (const PauliString& p : x_stabilizers(spec)) j["x"].push_back(p.str());
  const LogicalOps ops = logical_ops(spec);
  j["logical_x"] = ordered_json::array();
  j["logical_z"] = ordered_json::array();
  for (const PauliString& p : ops.x) j["logical_x"].push_back(p.str());
  for (const PauliString& p : ops.z) j["logical_z"].push_back(p.str());
  j["x_all"] = ops.x_all.str();
  ordered_json layout = ordered_json::array();
  for (int b = 0; b < spec.blocks(); ++b) {
    std::string row = "block " + std::to_string(b) +
                      (b < spec.w ? " (check):  " : " (logical " + std::to_string(b - spec.w) +
                                                        "): ");
    for (int q = spec.block_start(b); q < spec.block_start(b) + spec.block_len(); ++q)
      row += " " + std::to_string(q);
    layout.push_back(row);
  }
  j["layout"] = std::move(layout);
  std::vector<PauliString> all = z_stabilizers(spec);
  const std::vector<PauliString> xs = x_stabilizers(spec);
  all.insert(all.end(), xs.begin(), xs.end());
  j["generator_rank"] = gf2_rank(all);
  j["expected_rank"] = spec.base_qubits() - spec.K;
  if (gf2_rank(all) != spec.base_qubits() - spec.K)
    out.failures.push_back("stabilizer generators are not independent");
  out.text = j.dump(2) + "\n";
  return out.failures.empty() ? 0 : 1;
}

int run_table(const CodeSpec& spec, Output& out) {
  if (!guard_qubits(spec, out)) return 1;
  const SyndromeTable table = build_table(spec);
  ordered_json j;
  j["spec"] = spec_to_json(spec);
  ordered_json entries = ordered_json::array();
  for (const auto& [syndrome, cands] : table.entries) {
    ordered_json e;
    e["syndrome"] = syndrome;
    e["canonical"] = cands[0].positions();
    ordered_json all = ordered_json::array();
    for (const ErrorString& c : cands) all.push_back(c.positions());
    e["candidates"] = std::move(all);
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  out.text = j.dump(2) + "\n";
  return 0;
}

int run_verify_aqec(const CodeSpec& spec, std::vector<double> grid, const std::string& format,
                    Output& out) {
  if (!guard_qubits(spec, out)) return 1;
  if (grid.empty()) grid = default_gamma_grid();
  const ScalingFit fit = residual_scaling(spec, grid);
  const OverlapReport probe = overlap_matrix(spec, grid.front(), spec.w);

  const double want_slope = spec.w + 1.0;
  const bool zeros_ok = probe.max_offdiag_ij <= 1e-12 && probe.max_offdiag_kl <= 1e-12;
  const bool slope_ok = fit.degenerate || std::abs(fit.slope - want_slope) <= 0.15;
  if (!zeros_ok) out.failures.push_back("cross-term overlaps above 1e-12");
  if (!slope_ok)
    out.failures.push_back("residual slope " + fmt17(fit.slope) + " not within 0.15 of " +
                           fmt17(want_slope));

  if (format == "csv") {
    CsvWriter csv;
    sweep_csv_header(csv);
    for (std::size_t p = 0; p < fit.gammas.size(); ++p)
      sweep_csv_row(csv, spec_label(spec), fit.gammas[p], "aqec_residual", fit.residuals[p],
                    0.0, true);
    sweep_csv_row(csv, spec_label(spec), 0.0, "residual_slope", fit.slope, 0.15, slope_ok);
    sweep_csv_row(csv, spec_label(spec), grid.front(), "max_offdiag_ij", probe.max_offdiag_ij,
                  1e-12, probe.max_offdiag_ij <= 1e-12);
    sweep_csv_row(csv, spec_label(spec), grid.front(), "max_offdiag_kl", probe.max_offdiag_kl,
                  1e-12, probe.max_offdiag_kl <= 1e-12);
    out.text = csv.text;
  } else {
    ordered_json j;
    j["spec"] = spec_to_json(spec);
    j["scaling"] = scaling_to_json(fit);
    j["expected_slope"] = want_slope;
    j["max_offdiag_ij"] = json_number(probe.max_offdiag_ij);
    j["max_offdiag_kl"] = json_number(probe.max_offdiag_kl);
    j["diag_spread"] = json_number(probe.diag_spread);
    j["pass"] = zeros_ok && slope_ok;
    out.text = j.dump(2) + "\n";
  }
  return out.failures.empty() ? 0 : 1;
}

int run_fidelity(const CodeSpec& spec, std::vector<double> grid, const std::string& backend,
                 SweepConfig cfg, long trajectories, bool seed_set, const std::string& format,
                 Output& out) {
  if (!guard_qubits(spec, out)) return 1;
  if (grid.empty()) grid = {1e-2, 3e-3, 1e-3};
  if (trajectories > 0 && !seed_set) {
    out.failures.push_back("--trajectories requires an explicit --seed");
    return 1;
  }
  cfg.backend = backend == "circuit" ? DecoderBackend::Circuit : DecoderBackend::Projector;
  const FidelitySweep sweep = fidelity_sweep(spec, grid, cfg);
  const int rounds = cfg.rounds;
  const unsigned seed = cfg.seed;

  std::vector<double> infid;
  for (const FidelityPoint& pt : sweep.points) infid.push_back(1.0 - pt.floor_value);
  InfidelityFit fit{};
  const bool fitted = rounds == 1 && grid.size() >= 2;
  if (fitted) fit = fit_infidelity(grid, infid);

  // Monte Carlo cross-check of the exact enumeration: sampled damping
  // weight classes against summed branch norms, 3 sigma.
  ordered_json mc = ordered_json::array();
  if (trajectories > 0) {
    std::mt19937 rng(seed);
    const StateVector enc = codeword(spec, 0);
    for (double gamma : grid) {
      std::vector<double> exact(spec.qubits() + 1, 0.0);
      for (const ErrorString& a : error_strings_up_to(spec.qubits(), spec.qubits()))
        exact[a.weight()] += apply_error_string(enc, a, gamma).squared_norm();
      std::vector<long> counts(spec.qubits() + 1, 0);
      for (long s = 0; s < trajectories; ++s)
        ++counts[sample_damping_pattern(enc, gamma, rng).weight()];
      for (int m = 0; m <= spec.qubits(); ++m) {
        const double freq = static_cast<double>(counts[m]) / trajectories;
        const double sigma =
            std::sqrt(std::max(exact[m] * (1.0 - exact[m]), 1e-12) / trajectories);
        const bool ok = std::abs(freq - exact[m]) <= 3.0 * sigma;
        if (!ok)
          out.failures.push_back("trajectory weight class " + std::to_string(m) +
                                 " off by more than 3 sigma at gamma " + fmt17(gamma));
        ordered_json row;
        row["gamma"] = json_number(gamma);
        row["weight"] = m;
        row["exact"] = json_number(exact[m]);
        row["sampled"] = json_number(freq);
        row["pass"] = ok;
        mc.push_back(std::move(row));
      }
    }
  }

  if (format == "csv") {
    CsvWriter csv;
    sweep_csv_header(csv);
    for (const FidelityPoint& pt : sweep.points) {
      sweep_csv_row(csv, spec_label(spec), pt.gamma, "worst_case_fidelity", pt.worst_case, 0.0,
                    true);
      sweep_csv_row(csv, spec_label(spec), pt.gamma, "branch_floor_fidelity", pt.floor_value,
                    0.0, true);
      sweep_csv_row(csv, spec_label(spec), pt.gamma, "truncation_bound", pt.truncation_bound,
                    0.0, true);
    }
    if (fitted) {
      sweep_csv_row(csv, spec_label(spec), 0.0, "infidelity_quadratic", fit.quad_constrained,
                    0.0, true);
      sweep_csv_row(csv, spec_label(spec), 0.0, "infidelity_linear", fit.lin_free,
                    1e-3 * fit.quad_constrained,
                    std::abs(fit.lin_free) <= 1e-3 * fit.quad_constrained);
    }
    out.text = csv.text;
  } else {
    ordered_json j;
    j["spec"] = spec_to_json(spec);
    j["backend"] = backend;
    j["rounds"] = rounds;
    j["cutoff"] = sweep.cutoff;
    ordered_json pts = ordered_json::array();
    for (const FidelityPoint& pt : sweep.points) {
      ordered_json row;
      row["gamma"] = json_number(pt.gamma);
      row["worst_case_fidelity"] = json_number(pt.worst_case);
      row["branch_floor_fidelity"] = json_number(pt.floor_value);
      row["truncation_bound"] = json_number(pt.truncation_bound);
      ordered_json per = ordered_json::array();
      for (double f : pt.input_fidelities) per.push_back(json_number(f));
      row["input_fidelities"] = std::move(per);
      pts.push_back(std::move(row));
    }
    j["points"] = std::move(pts);
    if (fitted) {
      j["infidelity_fit"] = ordered_json{{"quadratic", json_number(fit.quad_constrained)},
                                         {"linear", json_number(fit.lin_free)}};
    }
    if (trajectories > 0) {
      j["trajectories"] = trajectories;
      j["seed"] = seed;
      j["monte_carlo"] = std::move(mc);
    }
    out.text = j.dump(2) + "\n";
  }
  return out.failures.empty() ? 0 : 1;
}

int run_rates(const std::string& format, Output& out) {
  const RateTables tables = rate_tables();
  if (format == "csv") {
    CsvWriter csv;
    csv.row({"w", "K", "n_this_family", "n_reference", "rate", "fewer_qubits"});
    for (const RatePairRow& row : tables.pairs)
      csv.row({std::to_string(row.w), std::to_string(row.K), std::to_string(row.n_this),
               std::to_string(row.n_reference), fmt17(row.rate), row.fewer_qubits ? "1" : "0"});
    out.text = csv.text;
  } else {
    ordered_json j;
    ordered_json formulas = ordered_json::array();
    for (const RateFormulaRow& f : tables.formulas) {
      ordered_json row;
      row["family"] = f.family;
      row["correction_weight"] = f.correction_weight;
      row["rate"] = f.rate;
      formulas.push_back(std::move(row));
    }
    j["formulas"] = std::move(formulas);
    ordered_json pairs = ordered_json::array();
    int fewer = 0;
    for (const RatePairRow& row : tables.pairs) {
      ordered_json r;
      r["w"] = row.w;
      r["K"] = row.K;
      r["n_this_family"] = row.n_this;
      r["n_reference"] = row.n_reference;
      r["rate"] = json_number(row.rate);
      r["fewer_qubits"] = row.fewer_qubits;
      fewer += row.fewer_qubits;
      pairs.push_back(std::move(r));
    }
    j["pairs"] = std::move(pairs);
    j["fewer_qubit_cases"] = fewer;
    out.text = j.dump(2) + "\n";
  }
  return 0;
}

// Machine-diffable renderings of the reference tables.
int run_repro(const std::string& target, const CodeSpec& spec, double gamma, Output& out) {
  if (target == "rate-formulas" || target == "qubit-counts")
    return run_rates(target == "qubit-counts" ? "csv" : "json", out);

  if (!guard_qubits(spec, out)) return 1;

  if (target == "codewords-k1" || target == "codewords-general")
    return run_codewords(spec, out);

  if (target == "error-branches") {
    std::string lines;
    for (std::uint64_t i = 0; i < dim_of(spec.K); ++i) {
      const StateVector cw = codeword(spec, i);
      for (const ErrorString& a : error_strings_up_to(spec.qubits(), spec.w)) {
        ChannelBranch b;
        b.a = a;
        b.state = apply_error_string(cw, a, gamma);
        b.squared_norm = b.state.squared_norm();
        ordered_json j = ordered_json::parse(branch_to_json_line(b, true));
        j["i"] = i;
        lines += j.dump();
        lines += '\n';
      }
    }
    out.text = lines;
    return 0;
  }

  if (target == "syndrome-branches" || target == "recovered-branches") {
    if (spec.w != 1) {
      out.failures.push_back("gate-level tables require a w = 1 code");
      return 1;
    }
    std::string lines;
    for (std::uint64_t i = 0; i < dim_of(spec.K); ++i) {
      const StateVector cw = codeword(spec, i);
      for (const ErrorString& a : error_strings_up_to(spec.qubits(), spec.w)) {
        const StateVector branch = apply_error_string(cw, a, gamma);
        if (branch.squared_norm() <= 1e-300) continue;
        if (target == "syndrome-branches") {
          for (const SyndromeBranch& sb : extract_syndrome(branch, spec)) {
            ordered_json j;
            j["i"] = i;
            j["a"] = a.str();
            j["syndrome"] = sb.syndrome.str();
            j["weight"] = json_number(sb.weight);
            lines += j.dump();
            lines += '\n';
          }
        } else {
          const CircuitRecoveryOutput rec = circuit_recover(branch, spec, gamma);
          for (const RecoveredBranch& rb : rec.branches) {
            ordered_json j;
            j["i"] = i;
            j["a"] = a.str();
            j["syndrome"] = rb.syndrome.str();
            j["correctable"] = rb.correctable;
            if (rb.correctable) {
              ordered_json amps = ordered_json::array();
              for (std::uint64_t l = 0; l < rb.logical.dim(); ++l)
                amps.push_back(ordered_json::array({l, json_number(rb.logical.amps[l].real()),
                                                    json_number(rb.logical.amps[l].imag())}));
              j["logical"] = std::move(amps);
            }
            j["weight"] = json_number(rb.weight);
            j["trace"] = rec.trace;
            lines += j.dump();
            lines += '\n';
          }
        }
      }
    }
    out.text = lines;
    return 0;
  }

  out.failures.push_back("unknown repro target: " + target);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"amplitude-damping Shor-code workbench"};
  app.require_subcommand(1);

  int w = 1, K = 1;
  bool dual_rail = false;
  double gamma = 0.1;
  std::vector<double> gamma_grid;
  double g_coupling = -1.0;
  double dt = 1.0;
  std::string decoder = "projector";
  int cutoff = -1;
  int rounds = 1;
  unsigned seed = 0;
  long trajectories = 0;
  std::string out_path;
  std::string format = "json";

  auto add_common = [&](CLI::App* cmd, bool with_spec) {
    if (with_spec) {
      cmd->add_option("--w", w, "correction weight");
      cmd->add_option("--K", K, "logical qubits");
      cmd->add_flag("--dual-rail", dual_rail, "concatenate with the dual-rail code");
    }
    cmd->add_option("--out", out_path, "output path (default stdout)");
    cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* c_codewords = app.add_subcommand("codewords", "emit codeword amplitudes");
  add_common(c_codewords, true);

  CLI::App* c_stab = app.add_subcommand("stabilizers", "emit generators and logical operators");
  add_common(c_stab, true);

  CLI::App* c_table = app.add_subcommand("table", "emit the syndrome lookup table");
  add_common(c_table, true);

  CLI::App* c_verify = app.add_subcommand("verify-aqec", "overlap zeros and residual scaling");
  add_common(c_verify, true);
  c_verify->add_option("--gamma-grid", gamma_grid, "damping rates, strictly decreasing")
      ->delimiter(',');

  CLI::App* c_fid = app.add_subcommand("fidelity", "fidelity sweep with recovery");
  add_common(c_fid, true);
  c_fid->add_option("--gamma", gamma, "single damping rate (alternative to --gamma-grid)");
  c_fid->add_option("--gamma-grid", gamma_grid)->delimiter(',');
  c_fid->add_option("--decoder", decoder)->check(CLI::IsMember({"projector", "circuit"}));
  c_fid->add_option("--cutoff", cutoff, "branch weight cutoff (default w)");
  c_fid->add_option("--rounds", rounds, "channel applications with recovery each round");
  CLI::Option* seed_opt = c_fid->add_option("--seed", seed);
  c_fid->add_option("--trajectories", trajectories, "Monte Carlo cross-check sample count");
  c_fid->add_option("--g", g_coupling, "collective coupling (negative)");
  c_fid->add_option("--dt", dt, "collective rotation time per round (0 = damping only)");
  CLI::Option* fid_gamma_opt = c_fid->get_option("--gamma");

  CLI::App* c_rates = app.add_subcommand("rates", "emit the rate comparison tables");
  add_common(c_rates, false);

  std::string repro_target;
  CLI::App* c_repro = app.add_subcommand("repro", "machine-diffable reference tables");
  add_common(c_repro, true);
  c_repro
      ->add_option("target", repro_target,
                   "one of: rate-formulas, qubit-counts, codewords-k1, codewords-general, "
                   "error-branches, syndrome-branches, recovered-branches")
      ->required();
  c_repro->add_option("--gamma", gamma, "damping rate for coefficient evaluation");

  CLI11_PARSE(app, argc, argv);

  Output out;
  out.path = out_path;

  int rc = 1;
  try {
    const CodeSpec spec(w, K, dual_rail);
    if (app.got_subcommand(c_codewords)) rc = run_codewords(spec, out);
    else if (app.got_subcommand(c_stab)) rc = run_stabilizers(spec, out);
    else if (app.got_subcommand(c_table)) rc = run_table(spec, out);
    else if (app.got_subcommand(c_verify)) rc = run_verify_aqec(spec, gamma_grid, format, out);
    else if (app.got_subcommand(c_fid)) {
      if (gamma_grid.empty() && fid_gamma_opt->count() > 0) gamma_grid = {gamma};
      SweepConfig cfg;
      cfg.rounds = rounds;
      cfg.cutoff = cutoff;
      cfg.seed = seed;
      cfg.g = g_coupling;
      cfg.dt = dt;
      rc = run_fidelity(spec, gamma_grid, decoder, cfg, trajectories, seed_opt->count() > 0,
                        format, out);
    }
    else if (app.got_subcommand(c_rates)) rc = run_rates(format, out);
    else if (app.got_subcommand(c_repro)) rc = run_repro(repro_target, spec, gamma, out);
  } catch (const std::exception& err) {
    out.failures.push_back(err.what());
    rc = 1;
  }
  out.emit();
  return rc;
}
