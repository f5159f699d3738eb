#pragma once

#include <string>

#include "numstab/qfunc.hpp"
#include "numstab/sme.hpp"

namespace numstab {

// Doubles are printed with %.17g so a read-back reproduces the exact bits.
std::string format_double(double v);

// Writes to path + ".partial" and renames into place, so readers never see
// a half-written file. Throws std::runtime_error on any filesystem failure.
void write_text_atomic(const std::string& path, const std::string& content);

// Column layout is fixed: "t,dy,n_est,n_var,distance,drive". dy holds the
// photocurrent increment accumulated since the previous row.
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec);

// Reads the series columns back; final_state and snapshots are not part of
// the CSV and come back empty. Throws std::runtime_error on malformed input.
TrajectoryRecord read_trajectory_csv(const std::string& path);

// One header line carrying the axes and the phase-space convention tag,
// then nx lines of ny values each (row i is the x[i] slice).
void write_qgrid(const std::string& path, const QGrid& grid);
QGrid read_qgrid(const std::string& path);

}  // namespace numstab
