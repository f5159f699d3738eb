#include "numstab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace numstab {

namespace {

constexpr const char* kTrajectoryHeader = "t,dy,n_est,n_var,distance,drive";

double parse_field(const std::string& tok, const std::string& path) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": bad numeric field '" + tok + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + tmp + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error("short write to '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw std::runtime_error("rename '" + tmp + "' -> '" + path +
                             "': " + ec.message());
  }
}

void write_trajectory_csv(const std::string& path,
                          const TrajectoryRecord& rec) {
  std::ostringstream out;
  out << kTrajectoryHeader << '\n';
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    out << format_double(rec.times[i]) << ',' << format_double(rec.dy[i])
        << ',' << format_double(rec.n_est[i]) << ','
        << format_double(rec.n_var[i]) << ',' << format_double(rec.distance[i])
        << ',' << format_double(rec.drive[i]) << '\n';
  }
  write_text_atomic(path, out.str());
}

TrajectoryRecord read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw std::runtime_error(path + ": missing trajectory header");
  }
  TrajectoryRecord rec;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tok;
    double fields[6];
    for (int f = 0; f < 6; ++f) {
      if (!std::getline(row, tok, ',')) {
        throw std::runtime_error(path + ": short row '" + line + "'");
      }
      fields[f] = parse_field(tok, path);
    }
    if (std::getline(row, tok, ',')) {
      throw std::runtime_error(path + ": extra fields in '" + line + "'");
    }
    rec.times.push_back(fields[0]);
    rec.dy.push_back(fields[1]);
    rec.n_est.push_back(fields[2]);
    rec.n_var.push_back(fields[3]);
    rec.distance.push_back(fields[4]);
    rec.drive.push_back(fields[5]);
  }
  return rec;
}

void write_qgrid(const std::string& path, const QGrid& grid) {
  std::ostringstream out;
  out << "qgrid nx=" << grid.x.size() << " ny=" << grid.y.size()
      << " x0=" << format_double(grid.x.front())
      << " x1=" << format_double(grid.x.back())
      << " y0=" << format_double(grid.y.front())
      << " y1=" << format_double(grid.y.back())
      << " convention=" << grid.convention_tag << '\n';
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(grid.values(i, j));
    }
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

QGrid read_qgrid(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::string word;
  if (!(in >> word) || word != "qgrid") {
    throw std::runtime_error(path + ": not a qgrid file");
  }
  long nx = -1, ny = -1;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  QGrid grid;
  for (int f = 0; f < 7; ++f) {
    if (!(in >> word)) {
      throw std::runtime_error(path + ": truncated qgrid header");
    }
    auto eq = word.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ": bad header token '" + word + "'");
    }
    std::string key = word.substr(0, eq), val = word.substr(eq + 1);
    if (key == "nx") nx = std::stol(val);
    else if (key == "ny") ny = std::stol(val);
    else if (key == "x0") x0 = parse_field(val, path);
    else if (key == "x1") x1 = parse_field(val, path);
    else if (key == "y0") y0 = parse_field(val, path);
    else if (key == "y1") y1 = parse_field(val, path);
    else if (key == "convention") grid.convention_tag = val;
    else throw std::runtime_error(path + ": unknown header key '" + key + "'");
  }
  if (nx < 2 || ny < 2) {
    throw std::runtime_error(path + ": bad qgrid dimensions");
  }
  grid.x.resize(static_cast<std::size_t>(nx));
  grid.y.resize(static_cast<std::size_t>(ny));
  for (long i = 0; i < nx; ++i) {
    grid.x[static_cast<std::size_t>(i)] = x0 + (x1 - x0) * i / (nx - 1);
  }
  for (long j = 0; j < ny; ++j) {
    grid.y[static_cast<std::size_t>(j)] = y0 + (y1 - y0) * j / (ny - 1);
  }
  grid.values.resize(nx, ny);
  for (long i = 0; i < nx; ++i) {
    for (long j = 0; j < ny; ++j) {
      if (!(in >> word)) {
        throw std::runtime_error(path + ": truncated qgrid data");
      }
      grid.values(i, j) = parse_field(word, path);
    }
  }
  return grid;
}

}  // namespace numstab
