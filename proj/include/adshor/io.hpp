#pragma once
// Serialization conventions shared by the CLI and the test suites:
// 17 significant digits, '.' decimal point, no locale; JSON numbers whose
// magnitude is below 1e-300 are emitted as strings so subnormal values
// survive a round trip unambiguously.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "adshor/channels.hpp"
#include "adshor/code.hpp"
#include "adshor/state.hpp"

namespace adshor {

using ordered_json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline ordered_json json_number(double v) {
  if (v != 0.0 && std::abs(v) < 1e-300) return ordered_json(fmt17(v));
  return ordered_json(v);
}

inline ordered_json spec_to_json(const CodeSpec& spec) {
  ordered_json j;
  j["w"] = spec.w;
  j["K"] = spec.K;
  j["dual_rail"] = spec.dual_rail;
  j["n_qubits"] = spec.qubits();
  return j;
}

// {spec, i, amplitudes as (index, re, im) triplets above the support cut}
inline ordered_json codeword_to_json(const CodeSpec& spec, std::uint64_t i,
                                     const StateVector& state, double support_cut = 1e-14) {
  ordered_json j;
  j["spec"] = spec_to_json(spec);
  j["i"] = i;
  ordered_json amps = ordered_json::array();
  for (std::uint64_t idx = 0; idx < state.dim(); ++idx) {
    if (std::abs(state.amps[idx]) <= support_cut) continue;
    amps.push_back(ordered_json::array(
        {idx, json_number(state.amps[idx].real()), json_number(state.amps[idx].imag())}));
  }
  j["amplitudes"] = std::move(amps);
  return j;
}

// One JSON line per branch: {a, weight, squared_norm, amplitudes?}
inline std::string branch_to_json_line(const ChannelBranch& b, bool with_amplitudes) {
  ordered_json j;
  j["a"] = b.a.str();
  j["weight"] = b.a.weight();
  j["squared_norm"] = json_number(b.squared_norm);
  if (with_amplitudes) {
    ordered_json amps = ordered_json::array();
    for (std::uint64_t idx = 0; idx < b.state.dim(); ++idx) {
      if (std::abs(b.state.amps[idx]) <= 1e-300) continue;
      amps.push_back(ordered_json::array(
          {idx, json_number(b.state.amps[idx].real()), json_number(b.state.amps[idx].imag())}));
    }
    j["amplitudes"] = std::move(amps);
  }
  return j.dump();
}

struct CsvWriter {
  std::string text;

  void row(const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) text += ',';
      text += cells[c];
    }
    text += '\n';
  }
};

// Sweep rows use the fixed schema: spec, gamma, metric, value, tolerance, pass.
inline void sweep_csv_header(CsvWriter& csv) {
  csv.row({"spec", "gamma", "metric", "value", "tolerance", "pass"});
}

inline void sweep_csv_row(CsvWriter& csv, const std::string& spec, double gamma,
                          const std::string& metric, double value, double tolerance,
                          bool pass) {
  csv.row({spec, fmt17(gamma), metric, fmt17(value), fmt17(tolerance), pass ? "1" : "0"});
}

inline std::string spec_label(const CodeSpec& spec) {
  std::string s = "w" + std::to_string(spec.w) + "K" + std::to_string(spec.K);
  if (spec.dual_rail) s += "dr";
  return s;
}

}  // namespace adshor
