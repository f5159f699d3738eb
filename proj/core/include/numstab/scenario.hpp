#pragma once

#include <string>

#include "numstab/cavity_qed.hpp"
#include "numstab/ensemble.hpp"
#include "numstab/sme.hpp"

namespace numstab {

// Default artifact names a scenario may suggest; command-line flags win.
// Relative file names resolve under dir.
struct OutputPaths {
  std::string dir{};
  std::string trajectory_csv{};
  std::string stats_csv{};
  std::string qgrid{};
};

// A scenario file is a JSON object with sections "simulation" (required;
// must provide at least dt and t_final), and optional "ensemble", "qed",
// "output". Unknown keys anywhere are an error rather than a silent no-op.
// Physical quantities in the qed section are unit-tagged strings ("1 uW",
// "852.35 nm", "12e3 rad/s"); the simulation section is dimensionless,
// expressed in the measurement-rate time base.
struct Scenario {
  SimParams sim{};
  bool has_ensemble = false;
  EnsembleSpec ensemble{};  // base mirrors sim
  bool has_qed = false;
  QEDParams qed{};
  OutputPaths output{};
};

Scenario parse_scenario(const std::string& json_text,
                        const std::string& origin);
Scenario load_scenario(const std::string& path);

}  // namespace numstab
