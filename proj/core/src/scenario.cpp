#include "numstab/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "numstab/units.hpp"

namespace numstab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::invalid_argument(origin + ": " + what);
}

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where, const std::string& origin) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(origin, "unknown key '" + item.key() + "' in " + where);
    }
  }
}

double get_number(const json& obj, const char* key, const std::string& origin) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(origin, std::string(key) + " must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& origin) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    fail(origin, std::string(key) + " must be an integer");
  }
  return v.get<int>();
}

std::string get_string(const json& obj, const char* key,
                       const std::string& origin) {
  const json& v = obj.at(key);
  if (!v.is_string()) fail(origin, std::string(key) + " must be a string");
  return v.get<std::string>();
}

InitialState parse_initial_state(const json& v, const std::string& origin) {
  if (v.is_string()) {
    if (v.get<std::string>() == "vacuum") return InitialState::vacuum();
    fail(origin, "initial_state string must be \"vacuum\"");
  }
  if (!v.is_object() || v.size() != 1) {
    fail(origin, "initial_state must be \"vacuum\" or a one-key object");
  }
  if (v.contains("coherent")) {
    const json& amp = v["coherent"];
    if (!amp.is_array() || amp.size() != 2 || !amp[0].is_number() ||
        !amp[1].is_number()) {
      fail(origin, "initial_state.coherent must be [re, im]");
    }
    return InitialState::coherent(
        Complex(amp[0].get<double>(), amp[1].get<double>()));
  }
  if (v.contains("number")) {
    if (!v["number"].is_number_integer() || v["number"].get<int>() < 0) {
      fail(origin, "initial_state.number must be a nonnegative integer");
    }
    return InitialState::number(v["number"].get<int>());
  }
  fail(origin, "initial_state object must hold 'coherent' or 'number'");
}

SimParams parse_simulation(const json& sec, const std::string& origin) {
  require_keys(sec,
               {"measurement_rate", "kappa", "eta", "gain", "n_star",
                "feedback", "dt", "t_final", "n_max", "seed", "initial_state",
                "record_stride", "snapshot_times", "positivity_check_stride"},
               "simulation", origin);
  if (!sec.contains("dt") || !sec.contains("t_final")) {
    fail(origin, "simulation needs both dt and t_final");
  }
  SimParams p;
  p.dt = get_number(sec, "dt", origin);
  p.t_final = get_number(sec, "t_final", origin);
  if (sec.contains("measurement_rate")) {
    p.measurement_rate = get_number(sec, "measurement_rate", origin);
  }
  if (sec.contains("kappa")) p.kappa = get_number(sec, "kappa", origin);
  if (sec.contains("eta")) p.eta = get_number(sec, "eta", origin);
  if (sec.contains("gain")) p.gain = get_number(sec, "gain", origin);
  if (sec.contains("n_star")) p.n_star = get_int(sec, "n_star", origin);
  if (sec.contains("feedback")) {
    if (!sec["feedback"].is_boolean()) {
      fail(origin, "feedback must be true or false");
    }
    p.feedback_enabled = sec["feedback"].get<bool>();
  }
  if (sec.contains("n_max")) p.n_max = get_int(sec, "n_max", origin);
  if (sec.contains("seed")) {
    if (!sec["seed"].is_number_integer()) fail(origin, "seed must be integral");
    p.seed = sec["seed"].get<std::uint64_t>();
  }
  if (sec.contains("initial_state")) {
    p.initial_state = parse_initial_state(sec["initial_state"], origin);
  }
  if (sec.contains("record_stride")) {
    p.record_stride = get_int(sec, "record_stride", origin);
  }
  if (sec.contains("positivity_check_stride")) {
    p.positivity_check_stride =
        get_int(sec, "positivity_check_stride", origin);
  }
  if (sec.contains("snapshot_times")) {
    const json& arr = sec["snapshot_times"];
    if (!arr.is_array()) fail(origin, "snapshot_times must be an array");
    for (const json& t : arr) {
      if (!t.is_number()) fail(origin, "snapshot_times entries are numbers");
      p.snapshot_times.push_back(t.get<double>());
    }
  }
  return p;
}

EnsembleSpec parse_ensemble(const json& sec, const SimParams& sim,
                            const std::string& origin) {
  require_keys(sec,
               {"n_traj", "master_seed", "workers", "kappa_sweep",
                "decimation"},
               "ensemble", origin);
  EnsembleSpec spec;
  spec.base = sim;
  if (sec.contains("decimation")) {
    spec.base.record_stride = get_int(sec, "decimation", origin);
  }
  if (sec.contains("n_traj")) spec.n_traj = get_int(sec, "n_traj", origin);
  if (spec.n_traj < 1) fail(origin, "n_traj must be >= 1");
  if (sec.contains("master_seed")) {
    if (!sec["master_seed"].is_number_integer()) {
      fail(origin, "master_seed must be integral");
    }
    spec.master_seed = sec["master_seed"].get<std::uint64_t>();
  }
  if (sec.contains("workers")) spec.workers = get_int(sec, "workers", origin);
  if (sec.contains("kappa_sweep")) {
    const json& arr = sec["kappa_sweep"];
    if (!arr.is_array() || arr.empty()) {
      fail(origin, "kappa_sweep must be a nonempty array");
    }
    for (const json& k : arr) {
      if (!k.is_number() || k.get<double>() < 0.0) {
        fail(origin, "kappa_sweep entries must be numbers >= 0");
      }
      spec.kappa_sweep.push_back(k.get<double>());
    }
  }
  return spec;
}

QEDParams parse_qed(const json& sec, const std::string& origin) {
  require_keys(sec,
               {"probe_power", "wavelength", "detuning", "beam_radius",
                "atom_count", "saturation", "g0", "kappa",
                "detection_efficiency", "gain", "atom", "cavity_length",
                "finesse"},
               "qed", origin);
  QEDParams q;
  // get_string already carries the origin; only the unit parsers need it
  // added, together with the key they choked on.
  auto tagged = [&](auto parser, const char* key) {
    const std::string text = get_string(sec, key, origin);
    try {
      return parser(text);
    } catch (const std::invalid_argument& e) {
      fail(origin, std::string(key) + ": " + e.what());
    }
  };
  q.probe_power = tagged(parse_power, "probe_power");
  q.wavelength = tagged(parse_length, "wavelength");
  q.detuning = tagged(parse_rate, "detuning");
  q.beam_radius = tagged(parse_length, "beam_radius");
  q.g0 = tagged(parse_rate, "g0");
  q.kappa = tagged(parse_rate, "kappa");
  if (sec.contains("cavity_length")) {
    q.cavity_length = tagged(parse_length, "cavity_length");
  }
  q.atom_count = get_number(sec, "atom_count", origin);
  q.saturation = get_number(sec, "saturation", origin);
  q.detection_efficiency = get_number(sec, "detection_efficiency", origin);
  if (sec.contains("gain")) q.gain = get_number(sec, "gain", origin);
  if (sec.contains("finesse")) q.finesse = get_number(sec, "finesse", origin);
  if (sec.contains("atom")) {
    std::string name = get_string(sec, "atom", origin);
    if (name != "cesium_d2") fail(origin, "unknown atom '" + name + "'");
    q.atom = cesium_d2();
  }
  q.validate();
  return q;
}

OutputPaths parse_output(const json& sec, const std::string& origin) {
  require_keys(sec, {"dir", "trajectory_csv", "stats_csv", "qgrid"}, "output",
               origin);
  OutputPaths out;
  if (sec.contains("dir")) out.dir = get_string(sec, "dir", origin);
  if (sec.contains("trajectory_csv")) {
    out.trajectory_csv = get_string(sec, "trajectory_csv", origin);
  }
  if (sec.contains("stats_csv")) {
    out.stats_csv = get_string(sec, "stats_csv", origin);
  }
  if (sec.contains("qgrid")) out.qgrid = get_string(sec, "qgrid", origin);
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text,
                        const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(origin, e.what());
  }
  if (!root.is_object()) fail(origin, "top level must be an object");
  require_keys(root, {"simulation", "ensemble", "qed", "output"}, "scenario",
               origin);
  if (!root.contains("simulation")) fail(origin, "missing simulation section");

  Scenario sc;
  sc.sim = parse_simulation(root["simulation"], origin);
  sc.sim.validate();
  if (root.contains("ensemble")) {
    sc.has_ensemble = true;
    sc.ensemble = parse_ensemble(root["ensemble"], sc.sim, origin);
  }
  if (root.contains("qed")) {
    sc.has_qed = true;
    sc.qed = parse_qed(root["qed"], origin);
  }
  if (root.contains("output")) {
    sc.output = parse_output(root["output"], origin);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open scenario '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace numstab
