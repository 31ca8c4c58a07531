// SPDX-License-Identifier: Apache-2.0
#include "spinqpu/pipelines.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "spinqpu/cavity_bus.hpp"
#include "spinqpu/config_io.hpp"
#include "spinqpu/dqs.hpp"
#include "spinqpu/qec.hpp"
#include "spinqpu/spin_system.hpp"
#include "spinqpu/transitions.hpp"

namespace spinqpu::pipelines {

namespace {

using io::format_number;
using io::Json;

double get_number(const Json& section, const std::string& key, const char* pipeline) {
  if (!section.contains(key) || !section[key].is_number())
    throw ValidationError(kModule, std::string(pipeline) + ": missing numeric key '" +
                                       key + "'");
  return section[key].get<double>();
}

double get_number_or(const Json& section, const std::string& key, double fallback) {
  if (!section.contains(key)) return fallback;
  if (!section[key].is_number())
    throw ValidationError(kModule, "key '" + key + "' must be a number");
  return section[key].get<double>();
}

bool get_bool_or(const Json& section, const std::string& key, bool fallback) {
  if (!section.contains(key)) return fallback;
  if (!section[key].is_boolean())
    throw ValidationError(kModule, "key '" + key + "' must be a boolean");
  return section[key].get<bool>();
}

// Grid helper: either an explicit array or {start, stop, count} (linear) /
// {log10_start, log10_stop, count} (logarithmic).
std::vector<double> parse_grid(const Json& node, const std::string& what) {
  std::vector<double> values;
  if (node.is_array()) {
    for (const auto& v : node) {
      if (!v.is_number())
        throw ValidationError(kModule, what + ": grid entries must be numbers");
      values.push_back(v.get<double>());
    }
  } else if (node.is_object() && node.contains("count")) {
    const int count = node["count"].get<int>();
    if (count < 1) throw ValidationError(kModule, what + ": grid count must be >= 1");
    if (node.contains("start") && node.contains("stop")) {
      const double start = node["start"].get<double>();
      const double stop = node["stop"].get<double>();
      for (int k = 0; k < count; ++k)
        values.push_back(count == 1 ? start
                                    : start + (stop - start) * k / (count - 1));
    } else if (node.contains("log10_start") && node.contains("log10_stop")) {
      const double start = node["log10_start"].get<double>();
      const double stop = node["log10_stop"].get<double>();
      for (int k = 0; k < count; ++k)
        values.push_back(std::pow(
            10.0, count == 1 ? start : start + (stop - start) * k / (count - 1)));
    } else {
      throw ValidationError(kModule, what + ": grid object needs start/stop");
    }
  } else {
    throw ValidationError(kModule, what + ": expected an array or a grid object");
  }
  if (values.empty()) throw ValidationError(kModule, what + ": empty sweep");
  return values;
}

const Json& section_of(const Json& config, const char* name) {
  if (!config.contains(name) || !config[name].is_object())
    throw ValidationError(kModule, std::string("config needs a '") + name +
                                       "' section for this pipeline");
  return config[name];
}

struct Artifact {
  std::string filename;
  std::string payload;
};

std::vector<Artifact> run_universality(const Json& config, int threads) {
  const spin::SpinSystemSpec spec = io::parse_system(section_of(config, "system"));
  const Json& section = section_of(config, "universality");
  const double amplitude = get_number(section, "drive_amplitude_ghz", "universality");
  const double omega_r = get_number(section, "omega_r_ghz", "universality");
  const double t2 = get_number(section, "t2_ns", "universality");
  if (!section.contains("b_values_tesla"))
    throw ValidationError(kModule, "universality: missing 'b_values_tesla'");
  const std::vector<double> b_values =
      parse_grid(section["b_values_tesla"], "universality");

  const auto points =
      transitions::field_sweep(spec, b_values, amplitude, omega_r, t2, threads);

  io::CsvBuilder csv({"B_tesla", "u_param", "universal", "n_edges",
                      "min_isolation_ghz", "degenerate_pair_count"});
  for (const auto& p : points)
    csv.add_row({format_number(p.b_tesla), format_number(p.u_param),
                 p.universal ? "1" : "0", std::to_string(p.n_edges),
                 format_number(p.min_isolation_ghz),
                 std::to_string(p.degenerate_pair_count)});
  return {{"universality_sweep.csv", csv.payload()}};
}

std::vector<Artifact> run_qec_gain(const Json& config, int threads,
                                   bool force_ideal) {
  const Json& section = section_of(config, "qec");
  const int order = static_cast<int>(get_number_or(section, "correction_order", 1));
  const double t2 = get_number(section, "t2_ns", "qec");
  const double pulse_rabi = get_number(section, "pulse_rabi_ghz", "qec");
  const double ancilla_t2 = get_number_or(section, "ancilla_t2_ns", 0.0);
  const bool ideal = force_ideal || get_bool_or(section, "ideal_pulses", false);

  qec::AncillaQuditSystem system;
  double qudit_spin;
  if (config.contains("system")) {
    const spin::SpinSystemSpec spec = io::parse_system(config["system"]);
    system = qec::ancilla_system_from_molecule(spec);
    qudit_spin = 0.5 * (system.qudit_dim - 1);
    if (section.contains("qudit_spin") &&
        std::abs(get_number(section, "qudit_spin", "qec") - qudit_spin) > 1e-9)
      throw ValidationError(kModule,
                            "qec: 'qudit_spin' disagrees with the system's nuclear spin");
  } else {
    qudit_spin = get_number(section, "qudit_spin", "qec");
    system = qec::ancilla_system_from_params(
        qudit_spin, get_number_or(section, "electron_gap_ghz", 9.8),
        get_number_or(section, "hyperfine_a_ghz", 0.15),
        get_number_or(section, "quadrupole_p_ghz", 0.04),
        get_number_or(section, "nuclear_zeeman_ghz", 0.01));
  }

  if (!section.contains("T_over_t2"))
    throw ValidationError(kModule, "qec: missing 'T_over_t2' grid");
  const std::vector<double> t_grid = parse_grid(section["T_over_t2"], "qec");

  const qec::QuditCode code = qec::solve_code_words(qudit_spin, order);
  const qec::QecProtocol protocol =
      qec::build_protocol(code, system, ancilla_t2, pulse_rabi);
  const auto curve =
      qec::memory_gain_curve(code, protocol, t2, t_grid, ideal, threads);

  io::CsvBuilder csv({"T_over_T2", "E", "E_half", "R"});
  for (const auto& p : curve)
    csv.add_row({format_number(p.t_over_t2), format_number(p.corrected_error),
                 format_number(p.spin_half_error), format_number(p.gain)});
  return {{"qec_gain.csv", csv.payload()}};
}

std::vector<Artifact> run_cavity_gate(const Json& config) {
  const Json& section = section_of(config, "cavity");
  cavity::CavityMode mode;
  mode.freq_ghz = get_number(section, "cavity_freq_ghz", "cavity");
  mode.kappa_ghz = get_number(section, "kappa_ghz", "cavity");
  mode.n_max = static_cast<int>(get_number_or(section, "n_max", 4));
  const double g1 = get_number(section, "g1_ghz", "cavity");
  const double g2 = get_number(section, "g2_ghz", "cavity");
  const double t2 = get_number(section, "t2_ns", "cavity");

  const spin::SpinSystemSpec device = io::parse_system(section_of(config, "system"));
  if (device.sites.size() != 2)
    throw ValidationError(kModule,
                          "cavity-gate: the system must have exactly two sites "
                          "(one per qudit)");
  auto port_for = [&device](int site, double g) {
    spin::SpinSystemSpec single;
    single.sites = {device.sites[site]};
    single.field_tesla = device.field_tesla;
    return cavity::make_port(spin::system_eigensystem(single), g);
  };
  const cavity::QuditPort q1 = port_for(0, g1);
  const cavity::QuditPort q2 = port_for(1, g2);

  auto pair_of = [&section](const char* key) {
    std::pair<int, int> pair{0, 1};
    if (section.contains(key)) {
      const Json& p = section[key];
      if (!p.is_array() || p.size() != 2)
        throw ValidationError(kModule, std::string("cavity: '") + key +
                                           "' must be a 2-array of level indices");
      pair = {p[0].get<int>(), p[1].get<int>()};
    }
    return pair;
  };

  const cavity::EffectiveCoupling coupling =
      cavity::effective_hamiltonian(q1, q2, mode);
  const cavity::DeviationReport deviation =
      cavity::validate_against_full_model(q1, q2, mode);
  const cavity::SwapGate gate =
      cavity::synthesize_swap(coupling, q1.energies_ghz, q2.energies_ghz,
                              pair_of("pair1"), pair_of("pair2"));
  const cavity::FeasibilityReport feas1 = cavity::feasibility(g1, t2, mode.kappa_ghz);
  const cavity::FeasibilityReport feas2 = cavity::feasibility(g2, t2, mode.kappa_ghz);

  io::CsvBuilder csv({"j_pair_ghz", "gate_time_ns", "transfer_population", "leakage",
                      "validity_ratio", "flip_flop_rel_error", "deviation_relative",
                      "truncation_warning", "g_t2_1", "g_t2_2", "g_over_kappa_1",
                      "g_over_kappa_2", "feasible_1", "feasible_2"});
  csv.add_row({format_number(gate.j_pair_ghz), format_number(gate.gate_time_ns),
               format_number(gate.transfer_population), format_number(gate.leakage),
               format_number(coupling.validity_ratio),
               format_number(deviation.flip_flop_rel_error),
               format_number(deviation.deviation_relative),
               deviation.truncation_warning ? "1" : "0",
               format_number(feas1.g_t2_product), format_number(feas2.g_t2_product),
               format_number(feas1.g_over_kappa), format_number(feas2.g_over_kappa),
               feas1.feasible ? "1" : "0", feas2.feasible ? "1" : "0"});
  return {{"cavity_gate.csv", csv.payload()}};
}

std::vector<Artifact> run_trotter_scan(const Json& config, bool force_ideal) {
  const Json& section = section_of(config, "trotter");
  std::vector<Artifact> artifacts;

  if (section.contains("model")) {
    const std::string kind = section["model"].get<std::string>();
    dqs::TargetModel model;
    if (kind == "spin_boson") {
      dqs::SpinBosonModel sb;
      sb.mode_freq_ghz = get_number_or(section, "mode_freq_ghz", 1.0);
      sb.spin_freq_ghz = get_number_or(section, "spin_freq_ghz", 1.0);
      sb.coupling_ghz = get_number_or(section, "coupling_ghz", 0.1);
      sb.n_b = static_cast<int>(get_number_or(section, "n_b", 4));
      model = sb;
    } else {
      dqs::SpinChainModel chain;
      if (kind == "xx")
        chain.kind = dqs::ChainKind::XX;
      else if (kind == "xy")
        chain.kind = dqs::ChainKind::XY;
      else if (kind == "heisenberg")
        chain.kind = dqs::ChainKind::Heisenberg;
      else if (kind == "ising")
        chain.kind = dqs::ChainKind::Ising;
      else
        throw ValidationError(kModule, "trotter: unknown model '" + kind + "'");
      chain.n_sites = static_cast<int>(get_number_or(section, "sites", 3));
      chain.j_ghz = get_number_or(section, "j_ghz", 1.0);
      chain.jy_ghz = get_number_or(section, "jy_ghz", 0.5);
      chain.field_ghz = get_number_or(section, "field_ghz", 0.0);
      model = chain;
    }
    const double t_ns = get_number(section, "t_ns", "trotter");
    const double gate_rabi = get_number_or(section, "gate_rabi_ghz", 0.01);
    const bool ideal = force_ideal || get_bool_or(section, "ideal_gates", false);
    std::vector<int> n_values, orders;
    for (double n : parse_grid(section.contains("n_values") ? section["n_values"]
                                                            : Json::array({4, 8, 16, 32}),
                               "trotter"))
      n_values.push_back(static_cast<int>(n));
    for (double o :
         parse_grid(section.contains("orders") ? section["orders"] : Json::array({1, 2}),
                    "trotter"))
      orders.push_back(static_cast<int>(o));

    io::CsvBuilder csv(
        {"n_steps", "order", "fidelity_error", "gate_count", "total_duration_ns"});
    for (int order : orders) {
      for (int n : n_values) {
        const dqs::GateSequence seq =
            dqs::trotterize(model, t_ns, n, order, gate_rabi, ideal);
        const double error = dqs::trotter_error(seq, model, t_ns);
        csv.add_row({std::to_string(n), std::to_string(order), format_number(error),
                     std::to_string(seq.gates.size()),
                     format_number(seq.total_duration_ns)});
      }
    }
    artifacts.push_back({"trotter_scan.csv", csv.payload()});
  }

  if (section.contains("resource_n_b")) {
    dqs::SpinBosonModel sb;
    sb.n_b = section["resource_n_b"].get<int>();
    sb.mode_freq_ghz = get_number_or(section, "mode_freq_ghz", 1.0);
    sb.spin_freq_ghz = get_number_or(section, "spin_freq_ghz", 1.0);
    sb.coupling_ghz = get_number_or(section, "coupling_ghz", 0.1);
    const dqs::ResourcePair resources = dqs::resource_compare(sb);
    io::CsvBuilder csv({"encoding", "n_b", "single_qudit_gates", "two_body_entanglers",
                        "total_duration_ns", "hardware_dim", "target_dim"});
    auto row = [&csv, &resources](const char* name, const dqs::ResourceEstimate& e) {
      csv.add_row({name, std::to_string(resources.n_b),
                   std::to_string(e.single_qudit_gates),
                   std::to_string(e.two_body_entanglers),
                   format_number(e.total_duration_ns), std::to_string(e.hardware_dim),
                   std::to_string(e.target_dim)});
    };
    row("qudit", resources.qudit);
    row("binary", resources.binary);
    artifacts.push_back({"resource_compare.csv", csv.payload()});
  }

  if (artifacts.empty())
    throw ValidationError(kModule,
                          "trotter: section needs 'model' and/or 'resource_n_b'");
  return artifacts;
}

}  // namespace

void run(const RunOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  if (options.pipeline.empty())
    throw ValidationError(kModule, "no pipeline selected");
  if (options.out_dir.empty())
    throw ValidationError(kModule, "no output directory given");

  Json config = io::load_json_file(options.spec_path);
  for (const auto& [key, value] : options.overrides)
    io::apply_override(config, key, value);

  std::vector<Artifact> artifacts;
  if (options.pipeline == "universality-sweep") {
    artifacts = run_universality(config, options.threads);
  } else if (options.pipeline == "qec-gain") {
    artifacts = run_qec_gain(config, options.threads, options.ideal_pulses);
  } else if (options.pipeline == "cavity-gate") {
    artifacts = run_cavity_gate(config);
  } else if (options.pipeline == "trotter-scan") {
    artifacts = run_trotter_scan(config, options.ideal_pulses);
  } else {
    throw ValidationError(kModule, "unknown pipeline '" + options.pipeline + "'");
  }

  std::filesystem::create_directories(options.out_dir);
  for (const auto& artifact : artifacts)
    io::write_file_atomic(options.out_dir / artifact.filename, artifact.payload);

  const auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
  io::OrderedJson manifest;
  manifest["tool"] = "spinqpu";
  manifest["version"] = kVersion;
  manifest["pipeline"] = options.pipeline;
  manifest["spec_path"] = options.spec_path.string();
  manifest["config"] = io::OrderedJson::parse(config.dump());
  manifest["outputs"] = io::OrderedJson::array();
  for (const auto& artifact : artifacts) manifest["outputs"].push_back(artifact.filename);
  manifest["wall_time_ms"] = elapsed;
  io::write_file_atomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string validate_spec(
    const std::filesystem::path& spec_path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  Json config = io::load_json_file(spec_path);
  for (const auto& [key, value] : overrides) io::apply_override(config, key, value);

  std::vector<std::string> violations;
  auto check = [&violations](bool ok, const std::string& message) {
    if (!ok) violations.push_back(message);
  };

  if (config.contains("system")) {
    try {
      io::parse_system(config["system"]);
    } catch (const Error& err) {
      violations.push_back(err.what());
    }
  }
  if (config.contains("universality") && config["universality"].is_object()) {
    const Json& u = config["universality"];
    check(get_number_or(u, "t2_ns", 1.0) > 0.0, "universality: t2_ns must be positive");
    check(get_number_or(u, "omega_r_ghz", 1.0) > 0.0,
          "universality: omega_r_ghz must be positive");
    check(get_number_or(u, "drive_amplitude_ghz", 1.0) > 0.0,
          "universality: drive_amplitude_ghz must be positive");
    if (u.contains("b_values_tesla")) {
      try {
        parse_grid(u["b_values_tesla"], "universality");
      } catch (const Error& err) {
        violations.push_back(err.what());
      }
    }
  }
  if (config.contains("qec") && config["qec"].is_object()) {
    const Json& q = config["qec"];
    check(get_number_or(q, "t2_ns", 1.0) > 0.0, "qec: t2_ns must be positive");
    check(get_number_or(q, "pulse_rabi_ghz", 1.0) > 0.0,
          "qec: pulse_rabi_ghz must be positive");
    check(get_number_or(q, "correction_order", 1.0) >= 1.0,
          "qec: correction_order must be >= 1");
    if (q.contains("qudit_spin"))
      check(is_half_integer(get_number_or(q, "qudit_spin", 1.5)),
            "qec: qudit_spin must be a half-integer");
  }
  if (config.contains("cavity") && config["cavity"].is_object()) {
    const Json& c = config["cavity"];
    check(get_number_or(c, "cavity_freq_ghz", 1.0) > 0.0,
          "cavity: cavity_freq_ghz must be positive");
    check(get_number_or(c, "kappa_ghz", 0.0) >= 0.0,
          "cavity: kappa_ghz must be nonnegative");
    check(get_number_or(c, "n_max", 2.0) >= 2.0, "cavity: n_max must be >= 2");
    check(get_number_or(c, "t2_ns", 1.0) > 0.0, "cavity: t2_ns must be positive");
    check(get_number_or(c, "g1_ghz", 0.0) >= 0.0, "cavity: g1_ghz must be nonnegative");
    check(get_number_or(c, "g2_ghz", 0.0) >= 0.0, "cavity: g2_ghz must be nonnegative");
  }
  if (config.contains("trotter") && config["trotter"].is_object()) {
    const Json& t = config["trotter"];
    check(get_number_or(t, "t_ns", 1.0) > 0.0, "trotter: t_ns must be positive");
    check(get_number_or(t, "sites", 2.0) >= 2.0, "trotter: sites must be >= 2");
  }

  if (!violations.empty()) {
    std::string joined;
    for (const auto& v : violations) {
      if (!joined.empty()) joined += "; ";
      joined += v;
    }
    throw ValidationError(kModule, joined);
  }
  return "ok";
}

}  // namespace spinqpu::pipelines
