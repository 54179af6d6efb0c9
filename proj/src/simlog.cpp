#include "plugpull/simlog.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "plugpull/errors.hpp"

namespace plugpull::sim {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t"};
    auto vec = [&](const char* name, int n, bool xyz) {
      static const char* axes[] = {"x", "y", "z"};
      for (int i = 0; i < n; ++i) {
        c.push_back(std::string(name) + "_" + (xyz ? axes[i] : std::to_string(i + 1)));
      }
    };
    vec("pc", 3, true);
    vec("pcd", 3, true);
    vec("vc", 3, true);
    vec("vcd", 3, true);
    vec("phi", 3, false);
    vec("thetaH", 4, false);
    vec("thetaHd", 4, false);
    vec("pH", 3, true);
    c.push_back("thetag");
    vec("fhat", 3, true);
    c.push_back("fdot_norm");
    vec("ftrue", 3, true);
    c.push_back("phase");
    c.push_back("attach");
    return c;
  }();
  return cols;
}

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drops the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  if (std::string(buf) == "-0") return "0";
  return buf;
}

void write_csv(std::ostream& out, const SimLog& log) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string line;
  auto put = [&](double x) {
    line += format_number(x);
    line += ',';
  };
  auto putv = [&](const auto& v) {
    for (int i = 0; i < v.size(); ++i) put(v[i]);
  };
  for (const auto& r : log.rows) {
    line.clear();
    put(r.t);
    putv(r.pc);
    putv(r.pcd);
    putv(r.vc);
    putv(r.vcd);
    putv(r.phi);
    putv(r.theta_h);
    putv(r.theta_hd);
    putv(r.p_h);
    put(r.theta_g);
    putv(r.fhat);
    put(r.fdot_norm);
    putv(r.ftrue);
    line += teleop::to_string(r.phase);
    line += ',';
    line += plant::to_string(r.attach);
    line += '\n';
    out << line;
  }
}

void write_csv_file(const std::string& path, const SimLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_csv(out, log);
  if (!out) throw Error("write failed for '" + path + "'");
}

namespace {

teleop::Phase parse_phase(const std::string& s) {
  if (s == "NOMINAL") return teleop::Phase::Nominal;
  if (s == "RECOVERY") return teleop::Phase::Recovery;
  throw Error("csv: bad phase '" + s + "'");
}

plant::AttachState parse_attach(const std::string& s) {
  if (s == "FREE") return plant::AttachState::Free;
  if (s == "GRASPED") return plant::AttachState::Grasped;
  if (s == "EXTRACTED") return plant::AttachState::Extracted;
  throw Error("csv: bad attachment state '" + s + "'");
}

}  // namespace

SimLog read_csv(std::istream& in) {
  const auto& cols = csv_columns();
  std::string line;
  if (!std::getline(in, line)) throw Error("csv: empty input");
  {
    std::string expect;
    for (std::size_t i = 0; i < cols.size(); ++i) expect += (i ? "," : "") + cols[i];
    if (line != expect) throw Error("csv: unexpected header");
  }
  SimLog log;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != cols.size()) {
      throw Error("csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                  " fields");
    }
    std::size_t k = 0;
    auto num = [&]() {
      const std::string& cell = f[k];
      char* end = nullptr;
      errno = 0;
      const double x = std::strtod(cell.c_str(), &end);
      // Underflow to a subnormal is fine; overflow and junk are not.
      const bool overflow = errno == ERANGE && std::abs(x) > 1.0;
      if (cell.empty() || end != cell.c_str() + cell.size() || overflow || !std::isfinite(x)) {
        throw Error("csv: line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      ++k;
      return x;
    };
    auto vec = [&](auto& v) {
      for (int i = 0; i < v.size(); ++i) v[i] = num();
    };
    LogRow r;
    r.t = num();
    vec(r.pc);
    vec(r.pcd);
    vec(r.vc);
    vec(r.vcd);
    vec(r.phi);
    vec(r.theta_h);
    vec(r.theta_hd);
    vec(r.p_h);
    r.theta_g = num();
    vec(r.fhat);
    r.fdot_norm = num();
    vec(r.ftrue);
    r.phase = parse_phase(f[k++]);
    r.attach = parse_attach(f[k++]);
    log.rows.push_back(r);
  }
  return log;
}

SimLog read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace plugpull::sim
