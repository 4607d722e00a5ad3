#include "shrinkflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace shrinkflow {

double kolmogorov_survival(double lambda) {
  if (lambda <= 0) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 101; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  KsResult r;
  r.n = static_cast<int>(samples.size());
  if (r.n == 0) return r;
  std::sort(samples.begin(), samples.end());
  double d = 0;
  for (int i = 0; i < r.n; ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / r.n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / r.n - f));
  }
  r.statistic = d;
  const double sn = std::sqrt(static_cast<double>(r.n));
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  KsResult r;
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  if (na == 0 || nb == 0) return r;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  r.statistic = d;
  r.n = na;
  const double ne = static_cast<double>(na) * nb / (na + nb);
  const double sn = std::sqrt(ne);
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) return f;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

double MomentSummary::z_score(double null_mean) const {
  if (n < 2 || variance <= 0) return 0;
  return (mean - null_mean) / std::sqrt(variance / n);
}

MomentSummary summarize(const std::vector<double>& xs) {
  MomentSummary s;
  s.n = static_cast<int>(xs.size());
  if (s.n == 0) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / s.n;
  double acc = 0;
  for (double x : xs) acc += (x - s.mean) * (x - s.mean);
  s.variance = (s.n > 1) ? acc / (s.n - 1) : 0;
  return s;
}

VertexHistogram VertexHistogram::from_points(const TriangulatedHypersurface& mesh,
                                             const std::vector<SurfacePoint>& points) {
  VertexHistogram h;
  h.mass = Eigen::VectorXd::Zero(mesh.n_vertices());
  if (points.empty()) return h;
  const double w = 1.0 / static_cast<double>(points.size());
  for (const auto& p : points) {
    const auto& tri = mesh.topology().triangles[p.triangle];
    for (int k = 0; k < 3; ++k) h.mass[tri[k]] += w * p.bary[k];
  }
  return h;
}

VertexHistogram VertexHistogram::uniform(const TriangulatedHypersurface& mesh) {
  VertexHistogram h;
  const auto& vg = mesh.vertex_geometry();
  h.mass = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) h.mass[v] = vg.vertex_area[v];
  h.mass /= h.mass.sum();
  return h;
}

Eigen::VectorXd VertexHistogram::density(const TriangulatedHypersurface& mesh) const {
  const auto& vg = mesh.vertex_geometry();
  Eigen::VectorXd d = mass;
  for (int v = 0; v < mesh.n_vertices(); ++v) d[v] /= vg.vertex_area[v];
  return d;
}

std::vector<int> coarse_partition(const TriangulatedHypersurface& mesh, int target_bins) {
  const auto& topo = mesh.topology();
  std::vector<int> bins(topo.n_vertices, -1);
  if (!topo.face_origin.empty()) {
    for (int t = 0; t < topo.n_triangles(); ++t) {
      const int o = topo.face_origin[t];
      for (int k = 0; k < 3; ++k) {
        int& b = bins[topo.triangles[t][k]];
        b = (b < 0) ? o : std::min(b, o);
      }
    }
    return bins;
  }
  // Greedy BFS patches of roughly equal vertex count.
  const int patch = std::max(1, topo.n_vertices / std::max(1, target_bins));
  int bin = 0;
  for (int seed = 0; seed < topo.n_vertices; ++seed) {
    if (bins[seed] >= 0) continue;
    std::deque<int> frontier{seed};
    int grabbed = 0;
    while (!frontier.empty() && grabbed < patch) {
      const int v = frontier.front();
      frontier.pop_front();
      if (bins[v] >= 0) continue;
      bins[v] = bin;
      ++grabbed;
      for (int t : topo.vertex_triangles[v])
        for (int k = 0; k < 3; ++k)
          if (bins[topo.triangles[t][k]] < 0) frontier.push_back(topo.triangles[t][k]);
    }
    ++bin;
  }
  return bins;
}

int partition_size(const std::vector<int>& bins) {
  int m = -1;
  for (int b : bins) m = std::max(m, b);
  return m + 1;
}

double tv_binned(const Eigen::VectorXd& mass_a, const Eigen::VectorXd& mass_b,
                 const std::vector<int>& bins) {
  const int nb = partition_size(bins);
  Eigen::VectorXd pa = Eigen::VectorXd::Zero(nb), pb = Eigen::VectorXd::Zero(nb);
  for (int v = 0; v < mass_a.size(); ++v) {
    pa[bins[v]] += mass_a[v];
    pb[bins[v]] += mass_b[v];
  }
  return 0.5 * (pa - pb).cwiseAbs().sum();
}

double tv_vertexwise(const Eigen::VectorXd& mass_a, const Eigen::VectorXd& mass_b) {
  return 0.5 * (mass_a - mass_b).cwiseAbs().sum();
}

double sphere_angle_cdf(double theta, double time, double a) {
  if (theta <= 0) return 0;
  if (theta >= M_PI) return 1;
  const double x = std::cos(theta);
  // Legendre recurrence; CDF(theta) = (1-x)/2 + sum_l e^{-l(l+1) a t} *
  // (P_{l-1}(x) - P_{l+1}(x)) / 2.
  double cdf = 0.5 * (1.0 - x);
  double p_prev = 1.0;  // P_0
  double p_cur = x;     // P_1
  for (int l = 1; l <= 100000; ++l) {
    const double decay = std::exp(-static_cast<double>(l) * (l + 1) * a * time);
    const double p_next = ((2 * l + 1) * x * p_cur - l * p_prev) / (l + 1);
    cdf += 0.5 * decay * (p_prev - p_next);
    if (decay < 1e-16 && l > 3) break;
    p_prev = p_cur;
    p_cur = p_next;
  }
  return std::clamp(cdf, 0.0, 1.0);
}

}  // namespace shrinkflow
