#pragma once

#include <Eigen/Dense>
#include <string>

namespace csmom {

struct SpectrumReport {
  Eigen::VectorXd values;  // singular values / sigma_max, non-increasing
  double condition = 0.0;  // sigma_max / sigma_min, inf when singular
  int size = 0;            // matrix dimension
};

// Full singular value decomposition of a square system matrix.
SpectrumReport singular_spectrum(const Eigen::MatrixXcd& m);
double condition_number(const Eigen::MatrixXcd& m);

void write_spectrum_csv(const SpectrumReport& report, const std::string& path);

}  // namespace csmom
