#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "shrinkflow/gtbm.hpp"

namespace shrinkflow {

/// Per-vertex density h(t, .) on the slice at T_c - t, with the lumped area
/// weights of that slice as the measure.
struct DensityField {
  double t = 0;
  Eigen::VectorXd values;
  Eigen::VectorXd vertex_area;

  double mass() const { return values.dot(vertex_area); }
  double min_value() const { return values.size() ? values.minCoeff() : 0; }
  void normalize();
};

DensityField uniform_density(const FlowTrajectory& traj, double t);
DensityField delta_density(const FlowTrajectory& traj, double t, int vertex);
DensityField density_from_values(const FlowTrajectory& traj, double t, Eigen::VectorXd values);

struct PdeOperators {
  Eigen::SparseMatrix<double> stiffness;  // cotangent, PSD, kernel = constants
  Eigen::VectorXd lumped_area;
  Eigen::VectorXd potential;  // squared mean curvature per vertex
  double dt_positivity_bound = 0;
};

/// Operators of the backward density equation on the slice at T_c - t.
PdeOperators assemble_density_operators(const FlowTrajectory& traj, double t);

/// Implicit-Euler evolution of the backward density equation. The vertices
/// are Lagrangian, so the shrinking-measure potential is realized exactly by
/// the slice's own area change and the step conserves the total mass
/// sum(h * a) to solver precision: (A(t+dt) + dt c K(t+dt)) h_new = A(t) h.
class DensityStepper {
public:
  DensityStepper(const FlowTrajectory& traj, GeneratorConvention conv);
  DensityField step(const DensityField& field, double dt);

private:
  const FlowTrajectory& traj_;
  GeneratorConvention conv_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool analyzed_ = false;
};

DensityField step_density(const FlowTrajectory& traj, const DensityField& field, double dt,
                          GeneratorConvention conv);

/// Evolves the field from field.t to t_end with uniform steps.
DensityField solve_density(const FlowTrajectory& traj, DensityField field, double t_end,
                           double dt, GeneratorConvention conv,
                           std::vector<std::pair<double, double>>* mass_log = nullptr);

struct UniquenessReport {
  std::vector<double> times;
  std::vector<double> l1_distance;  // ||h_a - h_b||_{L1(measure)}
  bool non_increasing = true;
};

/// Contraction experiment: evolve two normalized initial data side by side
/// and record their L1(measure) distance.
UniquenessReport uniqueness_experiment(const FlowTrajectory& traj, DensityField h_a,
                                       DensityField h_b, double t_end, double dt,
                                       GeneratorConvention conv);

struct FeynmanKacReport {
  double tv_binned = 0;
  double tv_vertex = 0;
  int n_paths = 0;
  bool insufficient_paths_warning = false;
  double t_star = 0;
};

/// Monte Carlo cross-validation: sample starts from h(eps) d(mu), run the
/// diffusion to t_star, compare the empirical vertex histogram with the
/// solved density mass h * a. Requires the half convention (the equation's).
FeynmanKacReport feynman_kac_check(const FlowTrajectory& traj, const DensityField& h_eps,
                                   double t_star, double dt, int n_paths,
                                   GeneratorConvention conv, uint64_t seed);

}  // namespace shrinkflow
