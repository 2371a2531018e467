#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "splitkit/catalog.hpp"
#include "splitkit/genmat.hpp"
#include "splitkit/spectral.hpp"

namespace splitkit {

// log(rho) / log(rho_jacobi); NaN when undefined (rho = 0, rho_jacobi in
// {0, 1}, or a non-finite input).
double speedup(double rho, double rho_jacobi);

// Worker count: requested if nonzero, else hardware concurrency, capped by
// the SPLITKIT_THREADS environment variable when set.
std::size_t resolve_threads(std::size_t requested);

// Mean by pairwise summation and population standard deviation.
struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};
Moments moments(const std::vector<double>& xs);

struct ExperimentConfig {
  MatrixClass cls = MatrixClass::Class1;
  std::size_t n = 100;
  double phi = 0.9;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::vector<MethodSpec> methods;
  std::size_t threads = 0;
  SpectralOptions spectral;
};

struct MethodStats {
  MethodSpec method;
  Moments rho;
  Moments speedup;
  std::size_t speedup_excluded = 0;
  std::size_t failures = 0;  // trials whose radius could not be computed or did not converge
};

struct TrialRecord {
  std::uint64_t seed = 0;
  double rho_jacobi = 0.0;
  std::vector<double> rho;  // per method, NaN on failure
  std::vector<std::uint8_t> converged;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<MethodStats> stats;
  std::vector<TrialRecord> trials;
};

// Trial t uses generator seed (seed + t). Trials run in parallel; results
// are gathered by trial index, so the report does not depend on the thread
// count.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::string experiment_csv(const ExperimentReport& rep);
std::string experiment_table(const ExperimentReport& rep);

struct PhiSweepConfig {
  MatrixClass cls = MatrixClass::Class3;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  std::vector<double> phis;
  std::vector<MethodSpec> methods;
  std::size_t threads = 0;
  SpectralOptions spectral;
};

struct PhiSweepReport {
  PhiSweepConfig config;
  std::vector<std::vector<double>> rho;  // [phi index][method index]
};

// One matrix draw; only the diagonal is rescaled as phi varies.
PhiSweepReport run_phi_sweep(const PhiSweepConfig& cfg);
std::vector<double> phi_grid(double start, double stop, double step);
std::string phi_sweep_csv(const PhiSweepReport& rep);

// The methods compared in the statistical tables.
std::vector<MethodSpec> table_methods();

}  // namespace splitkit
