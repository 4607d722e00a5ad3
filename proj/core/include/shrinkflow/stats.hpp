#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "shrinkflow/mesh.hpp"

namespace shrinkflow {

struct KsResult {
  double statistic = 0;
  double p_value = 0;
  int n = 0;
};

/// One-sample Kolmogorov-Smirnov against a CDF (asymptotic p-value with the
/// Stephens small-sample correction).
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov.
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct MomentSummary {
  double mean = 0, variance = 0;
  int n = 0;
  double z_score(double null_mean = 0) const;
};

MomentSummary summarize(const std::vector<double>& xs);

/// Probability mass per vertex (sums to 1) from weighted point samples.
struct VertexHistogram {
  Eigen::VectorXd mass;

  static VertexHistogram from_points(const TriangulatedHypersurface& mesh,
                                     const std::vector<SurfacePoint>& points);
  /// Uniform surface measure: mass proportional to lumped vertex area.
  static VertexHistogram uniform(const TriangulatedHypersurface& mesh);
  Eigen::VectorXd density(const TriangulatedHypersurface& mesh) const;  // mass / vertex area
};

/// Vertex partition into coarse patches for total-variation estimates.
/// Generated meshes carry their coarse-face provenance (20 icosahedron
/// faces); other meshes fall back to greedy BFS patches. The plug-in TV on
/// K bins has sampling bias ~ sqrt(K / (2 pi N)), far below the per-vertex
/// estimator's, and lower-bounds the true TV.
std::vector<int> coarse_partition(const TriangulatedHypersurface& mesh, int target_bins = 20);
int partition_size(const std::vector<int>& bins);

double tv_binned(const Eigen::VectorXd& mass_a, const Eigen::VectorXd& mass_b,
                 const std::vector<int>& bins);
double tv_vertexwise(const Eigen::VectorXd& mass_a, const Eigen::VectorXd& mass_b);

/// CDF of the angular displacement of Brownian motion on the unit 2-sphere
/// run for `time` with generator a*Laplacian (Legendre series, exact up to
/// truncation below 1e-16).
double sphere_angle_cdf(double theta, double time, double a);

}  // namespace shrinkflow
