#include "sphfield/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

namespace sphfield::csv {

namespace {

// Splits one CSV line, reporting 1-based column offsets of each field.
std::vector<std::pair<std::string, int>> split_line(const std::string& line) {
  std::vector<std::pair<std::string, int>> fields;
  std::string cur;
  int col = 1;
  int field_col = 1;
  for (char ch : line) {
    if (ch == ',') {
      fields.emplace_back(cur, field_col);
      cur.clear();
      field_col = col + 1;
    } else {
      cur.push_back(ch);
    }
    ++col;
  }
  fields.emplace_back(cur, field_col);
  return fields;
}

double parse_double(const std::string& text, int line, int column) {
  if (text.empty()) throw ParseError(line, column, "empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size())
    throw ParseError(line, column, "malformed number '" + text + "'");
  return v;
}

void expect_header(std::istream& in, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(1, 1, "missing header line, expected '" + expected + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected)
    throw ParseError(1, 1, "bad header '" + line + "', expected '" + expected + "'");
}

}  // namespace

ParseError::ParseError(int line, int column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_points(std::ostream& out, std::span<const geom::CartPoint> points) {
  out << "x,y,z\n";
  for (const auto& p : points)
    out << format17(p.x) << ',' << format17(p.y) << ',' << format17(p.z) << '\n';
}

void write_measurements(std::ostream& out, const field::Measurements& m) {
  out << "x,y,z,re,im\n";
  for (std::size_t i = 0; i < m.positions.size(); ++i) {
    const auto& p = m.positions[i];
    out << format17(p.x) << ',' << format17(p.y) << ',' << format17(p.z) << ','
        << format17(m.pressures[i].real()) << ','
        << format17(m.pressures[i].imag()) << '\n';
  }
}

field::Measurements read_measurements(std::istream& in) {
  expect_header(in, "x,y,z,re,im");
  field::Measurements m;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 5)
      throw ParseError(line_no, 1,
                       "expected 5 fields, got " + std::to_string(fields.size()));
    double v[5];
    for (int i = 0; i < 5; ++i)
      v[i] = parse_double(fields[i].first, line_no, fields[i].second);
    m.positions.push_back({v[0], v[1], v[2]});
    m.pressures.emplace_back(v[3], v[4]);
  }
  return m;
}

std::vector<geom::CartPoint> read_points(std::istream& in) {
  expect_header(in, "x,y,z");
  std::vector<geom::CartPoint> pts;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 3)
      throw ParseError(line_no, 1,
                       "expected 3 fields, got " + std::to_string(fields.size()));
    double v[3];
    for (int i = 0; i < 3; ++i)
      v[i] = parse_double(fields[i].first, line_no, fields[i].second);
    pts.push_back({v[0], v[1], v[2]});
  }
  return pts;
}

void write_coeffs(std::ostream& out, const sh::ShCoefficients& c) {
  out << "n,m,re,im\n";
  for (int n = 0; n <= c.order; ++n)
    for (int m = -n; m <= n; ++m) {
      const auto& v = c.at(sphfield::specfun::ModeIndex{n, m});
      out << n << ',' << m << ',' << format17(v.real()) << ','
          << format17(v.imag()) << '\n';
    }
}

void write_amplitudes(std::ostream& out, const pw::PwModel& model) {
  out << "dx,dy,dz,re,im\n";
  for (std::size_t l = 0; l < model.directions.size(); ++l) {
    const auto& d = model.directions[l];
    out << format17(d.x) << ',' << format17(d.y) << ',' << format17(d.z) << ','
        << format17(model.amplitudes[l].real()) << ','
        << format17(model.amplitudes[l].imag()) << '\n';
  }
}

void write_loss_log(std::ostream& out, std::span<const train::LossReport> reports) {
  out << "epoch,l_data,l_pde,l_bc,total\n";
  for (const auto& r : reports)
    out << r.epoch << ',' << format17(r.l_data) << ',' << format17(r.l_pde)
        << ',' << format17(r.l_bc) << ',' << format17(r.weighted_total) << '\n';
}

void write_sweep(std::ostream& out, const eval::SweepTable& table) {
  out << "radius";
  for (const auto& name : table.names) out << ",nmse_" << name;
  out << '\n';
  for (std::size_t i = 0; i < table.radii.size(); ++i) {
    out << format17(table.radii[i]);
    for (double v : table.nmse_db[i]) out << ',' << format17(v);
    out << '\n';
  }
}

void write_slice(std::ostream& out, std::span<const eval::SliceRow> rows) {
  out << "theta,phi,re,im,err\n";
  for (const auto& r : rows)
    out << format17(r.theta) << ',' << format17(r.phi) << ',' << format17(r.re)
        << ',' << format17(r.im) << ',' << format17(r.err) << '\n';
}

void write_field_values(std::ostream& out, std::span<const geom::CartPoint> points,
                        std::span<const specfun::Complex> values) {
  out << "x,y,z,re,im\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    out << format17(p.x) << ',' << format17(p.y) << ',' << format17(p.z) << ','
        << format17(values[i].real()) << ',' << format17(values[i].imag())
        << '\n';
  }
}

}  // namespace sphfield::csv
