#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

#include "csmom/physics.hpp"

namespace csmom {

// Cumulative counters for solves nested inside operator applications.
struct InnerSolveStats {
  long iterations = 0;
  long solves = 0;
};

// Square complex operator applied matrix-free. Implementations must be
// deterministic; apply() on a const instance is safe to call concurrently.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual int size() const = 0;
  virtual void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const = 0;
  // Dense form, by default one apply per unit vector; overridden where an
  // exact or cheaper construction exists.
  virtual Eigen::MatrixXcd materialize() const;
  // Nested-solve counters; zero for operators without inner solves.
  virtual InnerSolveStats inner_stats() const { return {}; }
};

class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw std::invalid_argument("MatrixOperator: matrix must be square");
    }
  }
  int size() const override { return static_cast<int>(m_.rows()); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override {
    y.noalias() = m_ * x;
  }
  Eigen::MatrixXcd materialize() const override { return m_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  Eigen::MatrixXcd m_;
};

}  // namespace csmom
