#pragma once

#include <string>
#include <vector>

#include "csmom/excitation.hpp"
#include "csmom/formulations.hpp"
#include "csmom/mesh.hpp"

namespace csmom {

struct GeometrySpec {
  std::string kind;   // "cube" | "icosphere" | "off"
  double size = 1.0;  // cube edge length or sphere diameter, meters
  int divisions = 1;  // cube grid divisions or sphere subdivisions
  std::string path;   // OFF file for kind == "off"
};
Mesh build_geometry(const GeometrySpec& g);
std::string geometry_id(const GeometrySpec& g);

struct FrequencySpec {
  double start_hz = 0.0;
  double stop_hz = 0.0;
  int points = 1;
  std::vector<double> frequencies() const;  // inclusive linear spacing
};

// Propagation direction in spherical angles; polarization along theta^ or phi^.
struct WaveSpec {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
  std::string polarization = "theta";
  double amplitude = 1.0;
};
PlaneWave build_wave(const WaveSpec& w);

struct SolverSpec {
  double tol = 1e-4;
  int max_iter = 1000;
  int restart = 0;  // 0: full GMRES
};

struct FormulationSpec {
  FormulationConfig cfg;
  bool precond = false;  // diagonal preconditioner (not for MFIE/CFIE)
  std::string tag() const;
};

struct ExperimentConfig {
  GeometrySpec geometry;
  FrequencySpec frequency;
  WaveSpec wave;
  SolverSpec solver;
  std::vector<FormulationSpec> formulations;
  std::vector<double> alphas;  // alpha-tradeoff sweep lists
  std::vector<double> combs;
  double grid_step_deg = 10.0;
  std::string out_dir = "out";
};

// Strict section/key parser for the experiment file format; throws
// std::invalid_argument with a line reference on any unknown or malformed
// entry. Referenced files must exist.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct RunOptions {
  std::string out_dir;    // overrides the config when non-empty
  std::string cache_dir;  // operator cache directory; empty disables caching
  int threads = 1;        // parallelism across frequency points
};

struct RunSummary {
  int attempted = 0;
  int failed = 0;  // runs that errored; the command still completes
};

// Experiment drivers. Config-level problems throw std::invalid_argument;
// per-run failures are recorded in the summary CSV and counted.
RunSummary cmd_solve(const ExperimentConfig& cfg, const RunOptions& opt);
RunSummary cmd_spectrum(const ExperimentConfig& cfg, const RunOptions& opt);
RunSummary cmd_mesh_info(const ExperimentConfig& cfg, const RunOptions& opt);
RunSummary cmd_alpha_tradeoff(const ExperimentConfig& cfg,
                              const RunOptions& opt);

}  // namespace csmom
