#include "shrinkflow/density.hpp"

#include <cmath>

#include "shrinkflow/curvature.hpp"

namespace shrinkflow {

void DensityField::normalize() {
  const double m = mass();
  if (!(m > 0)) fail(ErrorCode::InvariantFailure, "density has non-positive mass");
  values /= m;
}

namespace {
Eigen::VectorXd slice_areas(const TriangulatedHypersurface& slice) {
  const auto& vg = slice.vertex_geometry();
  Eigen::VectorXd a(slice.n_vertices());
  for (int v = 0; v < slice.n_vertices(); ++v) a[v] = vg.vertex_area[v];
  return a;
}
}  // namespace

DensityField uniform_density(const FlowTrajectory& traj, double t) {
  const auto slice = traj.slice_backward(t);
  DensityField f;
  f.t = t;
  f.vertex_area = slice_areas(slice);
  f.values = Eigen::VectorXd::Constant(slice.n_vertices(), 1.0 / slice.total_area());
  return f;
}

DensityField delta_density(const FlowTrajectory& traj, double t, int vertex) {
  const auto slice = traj.slice_backward(t);
  if (vertex < 0 || vertex >= slice.n_vertices()) fail(ErrorCode::BadParams, "vertex out of range");
  DensityField f;
  f.t = t;
  f.vertex_area = slice_areas(slice);
  f.values = Eigen::VectorXd::Zero(slice.n_vertices());
  f.values[vertex] = 1.0 / f.vertex_area[vertex];
  return f;
}

DensityField density_from_values(const FlowTrajectory& traj, double t, Eigen::VectorXd values) {
  const auto slice = traj.slice_backward(t);
  if (values.size() != slice.n_vertices()) fail(ErrorCode::BadParams, "value count mismatch");
  DensityField f;
  f.t = t;
  f.vertex_area = slice_areas(slice);
  f.values = std::move(values);
  return f;
}

PdeOperators assemble_density_operators(const FlowTrajectory& traj, double t) {
  const auto slice = traj.slice_backward(t);
  PdeOperators ops;
  auto lap = assemble_laplacian(slice);
  ops.stiffness = std::move(lap.stiffness);
  ops.lumped_area = std::move(lap.lumped_area);
  const auto& vg = slice.vertex_geometry();
  ops.potential.resize(slice.n_vertices());
  for (int v = 0; v < slice.n_vertices(); ++v)
    ops.potential[v] = vg.mean_curvature[v] * vg.mean_curvature[v];
  double bound = std::numeric_limits<double>::infinity();
  for (int v = 0; v < slice.n_vertices(); ++v) {
    const double kii = ops.stiffness.coeff(v, v);
    if (kii > 0) bound = std::min(bound, ops.lumped_area[v] / kii);
  }
  ops.dt_positivity_bound = 0.5 * bound;
  return ops;
}

DensityStepper::DensityStepper(const FlowTrajectory& traj, GeneratorConvention conv)
    : traj_(traj), conv_(conv) {
  conv_.validate();
}

DensityField DensityStepper::step(const DensityField& field, double dt) {
  if (!(dt > 0)) {
    if (dt == 0) return field;
    fail(ErrorCode::BadParams, "dt must be non-negative");
  }
  const double t_next = field.t + dt;
  const auto slice_next = traj_.slice_backward(t_next);
  auto lap = assemble_laplacian(slice_next);

  Eigen::SparseMatrix<double> system = lap.stiffness * (conv_.c * dt);
  for (int v = 0; v < slice_next.n_vertices(); ++v)
    system.coeffRef(v, v) += lap.lumped_area[v];
  if (!analyzed_) {
    solver_.analyzePattern(system);
    analyzed_ = true;
  }
  solver_.factorize(system);
  if (solver_.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "density factorization failed");

  const Eigen::VectorXd rhs = field.values.cwiseProduct(field.vertex_area);
  Eigen::VectorXd h_next = solver_.solve(rhs);
  if (solver_.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "density solve failed");
  const double residual = (system * h_next - rhs).norm();
  if (residual > 1e-10 * std::max(1.0, rhs.norm()))
    fail(ErrorCode::SolverFailure, "density solve residual " + std::to_string(residual));

  DensityField out;
  out.t = t_next;
  out.values = std::move(h_next);
  out.vertex_area = std::move(lap.lumped_area);
  return out;
}

DensityField step_density(const FlowTrajectory& traj, const DensityField& field, double dt,
                          GeneratorConvention conv) {
  DensityStepper stepper(traj, conv);
  return stepper.step(field, dt);
}

DensityField solve_density(const FlowTrajectory& traj, DensityField field, double t_end,
                           double dt, GeneratorConvention conv,
                           std::vector<std::pair<double, double>>* mass_log) {
  if (t_end < field.t) fail(ErrorCode::BadParams, "t_end before the field time");
  DensityStepper stepper(traj, conv);
  const int steps = std::max(1, static_cast<int>(std::llround((t_end - field.t) / dt)));
  const double h = (t_end - field.t) / steps;
  if (mass_log) mass_log->push_back({field.t, field.mass()});
  for (int k = 0; k < steps; ++k) {
    field = stepper.step(field, h);
    if (mass_log) mass_log->push_back({field.t, field.mass()});
  }
  return field;
}

UniquenessReport uniqueness_experiment(const FlowTrajectory& traj, DensityField h_a,
                                       DensityField h_b, double t_end, double dt,
                                       GeneratorConvention conv) {
  if (std::abs(h_a.t - h_b.t) > 1e-12) fail(ErrorCode::BadParams, "fields start at different times");
  UniquenessReport rep;
  DensityStepper stepper_a(traj, conv);
  DensityStepper stepper_b(traj, conv);
  const int steps = std::max(1, static_cast<int>(std::llround((t_end - h_a.t) / dt)));
  const double h = (t_end - h_a.t) / steps;
  auto l1 = [&](const DensityField& a, const DensityField& b) {
    return ((a.values - b.values).cwiseAbs().cwiseProduct(a.vertex_area)).sum();
  };
  rep.times.push_back(h_a.t);
  rep.l1_distance.push_back(l1(h_a, h_b));
  for (int k = 0; k < steps; ++k) {
    h_a = stepper_a.step(h_a, h);
    h_b = stepper_b.step(h_b, h);
    rep.times.push_back(h_a.t);
    rep.l1_distance.push_back(l1(h_a, h_b));
    const size_t m = rep.l1_distance.size();
    if (rep.l1_distance[m - 1] > rep.l1_distance[m - 2] * (1 + 1e-10) + 1e-14)
      rep.non_increasing = false;
  }
  return rep;
}

FeynmanKacReport feynman_kac_check(const FlowTrajectory& traj, const DensityField& h_eps,
                                   double t_star, double dt, int n_paths,
                                   GeneratorConvention conv, uint64_t seed) {
  if (conv.c != 0.5)
    fail(ErrorCode::ConfigError, "the density equation fixes the half convention");
  FeynmanKacReport rep;
  rep.n_paths = n_paths;
  rep.t_star = t_star;
  rep.insufficient_paths_warning = n_paths < 1000;

  // PDE side.
  DensityField solved = solve_density(traj, h_eps, t_star, dt, conv, nullptr);
  Eigen::VectorXd pde_mass = solved.values.cwiseProduct(solved.vertex_area);
  pde_mass /= pde_mass.sum();

  // Monte Carlo side: multinomial starts from the initial mass vector.
  const auto slice0 = traj.slice_backward(h_eps.t);
  Eigen::VectorXd m0 = h_eps.values.cwiseProduct(h_eps.vertex_area);
  m0 /= m0.sum();
  std::vector<double> cum(m0.size());
  double acc = 0;
  for (int v = 0; v < m0.size(); ++v) {
    acc += m0[v];
    cum[v] = acc;
  }
  uint64_t start_seed = seed ^ 0x5EEDFACEull;
  RngStream start_rng(splitmix64(start_seed));
  std::vector<SurfacePoint> starts(n_paths);
  const auto& topo = slice0.topology();
  for (int i = 0; i < n_paths; ++i) {
    const double u = start_rng.uniform();
    const int v = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    SurfacePoint p;
    p.triangle = topo.vertex_triangles[v].front();
    p.bary = Vec3::Zero();
    p.bary[topo.local_index(p.triangle, v)] = 1.0;
    starts[i] = p;
  }

  EnsembleOptions opts;
  opts.t0 = h_eps.t;
  opts.t1 = t_star;
  opts.dt = dt;
  opts.conv = conv;
  opts.seed = seed;
  opts.paths = n_paths;
  const auto ens = run_ensemble(traj, starts, opts);

  const auto slice_star = traj.slice_backward(t_star);
  const auto hist = VertexHistogram::from_points(slice_star, ens.terminal);
  const auto bins = coarse_partition(slice_star);
  rep.tv_binned = tv_binned(hist.mass, pde_mass, bins);
  rep.tv_vertex = tv_vertexwise(hist.mass, pde_mass);
  return rep;
}

}  // namespace shrinkflow
