#pragma once

#include "anisocap/variational.hpp"

namespace anisocap {

struct FlowConfig {
  double step = 5e-3;        // initial time step (adaptive)
  int max_steps = 20000;
  double camc_target = 1e-3; // sup |H_F density - mean| stopping threshold
  double volume_tol = 1e-6;  // relative volume drift budget per step
  double smoothing = 0.05;   // tangential smoothing weight, <= 0.1
  int fit_every = 50;        // Wulff-fit cadence in the trace (0 = final only)
  unsigned max_halvings = 40;
};

/// Best-fit truncated Wulff shape over horizontal translation and homothety:
/// the surface { (tx, ty, s*omega0) + s * Phi(z) } cut by the plane.
struct WulffFit {
  Vec3 center = Vec3::Zero();  // (tx, ty, s * omega0)
  double scale = 1.0;
  double max_distance = 0.0;   // sup over vertices of the gauge-ray distance
};
WulffFit fit_truncated_wulff(const CapillaryMesh& mesh, const Anisotropy& aniso,
                             const HalfSpaceConfig& config);

struct FlowStepRecord {
  int step = 0;
  double energy = 0.0;
  double volume = 0.0;
  double camc = 0.0;               // sup |H_F density - area-weighted mean|
  double boundary_residual = 0.0;  // sup in-plane stationarity density on the contact line
  double step_size = 0.0;
  double hausdorff = -1.0;         // relative fit distance; -1 when not evaluated
};

struct FlowTrace {
  std::vector<FlowStepRecord> records;
  CapillaryMesh final_mesh;
  bool converged = false;
  double final_camc = 0.0;
  double final_hausdorff = 0.0;
  WulffFit fit;
};

/// One accepted step of the volume-preserving capillary gradient flow.
/// `step_io` carries the adaptive step size across calls; throws after
/// max_halvings failed halvings.
CapillaryMesh flow_step(const CapillaryMesh& mesh, const Anisotropy& aniso,
                        const HalfSpaceConfig& config, const FlowConfig& flowcfg,
                        double& step_io);

FlowTrace run_flow(const CapillaryMesh& mesh, const Anisotropy& aniso,
                   const HalfSpaceConfig& config, const FlowConfig& flowcfg);

/// Interior stationarity diagnostics of the constrained energy: the CAMC
/// residual and the boundary in-plane residual used by the flow.
struct StationarityDiagnostics {
  double camc = 0.0;
  double boundary = 0.0;
  double mean_HF = 0.0;
};
StationarityDiagnostics stationarity_diagnostics(const CapillaryMesh& mesh,
                                                 const Anisotropy& aniso,
                                                 const HalfSpaceConfig& config);

}  // namespace anisocap
