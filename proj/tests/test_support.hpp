#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>

#include "thermocal/forward_model.hpp"
#include "thermocal/statmodel.hpp"
#include "thermocal/synthetic.hpp"

namespace thermocal::testkit {

// The shipped forcing fixture (7 days at 300 s); falls back to regenerating
// it when the data directory is unavailable.
const ForcingMatrix& fixture_forcing();

std::filesystem::path data_dir();

// Fresh temporary directory under the system temp path.
std::filesystem::path temp_dir(const std::string& stem);

// Adaptive Simpson quadrature; test-only oracle.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                 int max_depth = 50);

// P[chi2_dof > x] by quadrature of the density (independent of the library's
// incomplete-gamma route).
double chi2_sf_quadrature(double x, double dof);

// Explicit Euler on the wall ODE with `substeps` sub-steps per record, written
// directly from the model equations. Power is sampled at the end of each record.
Series fine_explicit_powers(const ParameterVector& theta, double initial_wall,
                            const ForcingMatrix& forcing, const CellGeometry& geom, int substeps);

// log pi(theta) = -theta1^2 / 2 with an effectively unbounded box; lambda2 is inert.
class QuadraticTarget final : public LogTarget {
 public:
  QuadraticTarget();
  Evaluation evaluate(const ParameterVector& theta, double lambda2) const override;
  double rescore(const ParameterVector& theta, double ss, double lambda2) const override;
  std::size_t observation_count() const override { return 1; }
  const PriorSpec& prior() const override { return prior_; }

 private:
  PriorSpec prior_;
};

// Gaussian likelihood with SS(theta) fixed at `ss` for every theta.
class FixedSSTarget final : public LogTarget {
 public:
  FixedSSTarget(double ss, std::size_t n);
  Evaluation evaluate(const ParameterVector& theta, double lambda2) const override;
  double rescore(const ParameterVector& theta, double ss, double lambda2) const override;
  std::size_t observation_count() const override { return n_; }
  const PriorSpec& prior() const override { return prior_; }

 private:
  double ss_;
  std::size_t n_;
  PriorSpec prior_;
};

}  // namespace thermocal::testkit
