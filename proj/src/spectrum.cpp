#include "csmom/spectrum.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

namespace csmom {

SpectrumReport singular_spectrum(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) throw std::invalid_argument("empty matrix");
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix not square");

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);  // values only
  const Eigen::VectorXd& sv = svd.singularValues();  // descending
  const double smax = sv(0);
  if (smax == 0.0) throw std::invalid_argument("zero matrix");
  const double smin = sv(sv.size() - 1);

  SpectrumReport report;
  report.values = sv / smax;
  report.condition = smin > 0.0 ? smax / smin
                                : std::numeric_limits<double>::infinity();
  report.size = static_cast<int>(m.rows());
  return report;
}

double condition_number(const Eigen::MatrixXcd& m) {
  return singular_spectrum(m).condition;
}

void write_spectrum_csv(const SpectrumReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::scientific << std::setprecision(16);
  out << "index,sigma_normalized\n";
  for (int i = 0; i < report.values.size(); ++i)
    out << i << ',' << report.values(i) << '\n';
}

}  // namespace csmom
