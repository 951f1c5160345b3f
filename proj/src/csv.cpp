#include "bellcool/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bellcool {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size())
    throw std::invalid_argument("CsvWriter: row width does not match header");
  rows_.push_back(values);
}

std::string CsvWriter::str() const {
  std::ostringstream os;
  for (size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
  return os.str();
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << str();
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

RateData read_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty trajectory file");

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  const auto header = split(line);
  bool fidelity_only;
  if (header.size() == 5 && header[0] == "t_us")
    fidelity_only = false;
  else if (header.size() == 2 && header[0] == "t_us")
    fidelity_only = true;
  else
    throw std::runtime_error(
        "trajectory header must be t_us,p_tminus,p_target,p_other,p_tplus or t_us,fidelity");

  RateData data;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw std::runtime_error("trajectory line " + std::to_string(lineno) +
                               ": wrong column count");
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(std::stod(c));
    data.t_us.push_back(v[0]);
    if (fidelity_only)
      data.fidelity.push_back(v[1]);
    else
      data.populations.push_back({v[1], v[2], v[3], v[4]});
  }
  if (!data.populations.empty()) {
    data.p0 = Populations{data.populations[0][0], data.populations[0][1],
                          data.populations[0][2], data.populations[0][3]};
  } else if (!data.fidelity.empty()) {
    data.p0 = Populations{1.0 - data.fidelity[0], data.fidelity[0], 0.0, 0.0};
  }
  return data;
}

}  // namespace bellcool
