#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphfield/eval.hpp"
#include "sphfield/field.hpp"
#include "sphfield/geom.hpp"
#include "sphfield/pw_estimator.hpp"
#include "sphfield/sh_estimator.hpp"
#include "sphfield/train.hpp"

namespace sphfield::csv {

// Parse failure with 1-based location in the input stream.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// All numeric fields are written with 17 significant digits (%.17g), which
// round-trips doubles exactly.
std::string format17(double v);

// header: x,y,z
void write_points(std::ostream& out, std::span<const geom::CartPoint> points);

// header: x,y,z,re,im
void write_measurements(std::ostream& out, const field::Measurements& m);
field::Measurements read_measurements(std::istream& in);

// header: x,y,z (positions only)
std::vector<geom::CartPoint> read_points(std::istream& in);

// header: n,m,re,im
void write_coeffs(std::ostream& out, const sh::ShCoefficients& c);

// header: dx,dy,dz,re,im
void write_amplitudes(std::ostream& out, const pw::PwModel& model);

// header: epoch,l_data,l_pde,l_bc,total
void write_loss_log(std::ostream& out, std::span<const train::LossReport> reports);

// header: radius,<name per estimator column>
void write_sweep(std::ostream& out, const eval::SweepTable& table);

// header: theta,phi,re,im,err
void write_slice(std::ostream& out, std::span<const eval::SliceRow> rows);

// Estimated field values, header: x,y,z,re,im
void write_field_values(std::ostream& out, std::span<const geom::CartPoint> points,
                        std::span<const specfun::Complex> values);

}  // namespace sphfield::csv
