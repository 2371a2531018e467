#include <doctest.h>

#include <cmath>
#include <numeric>

#include "splitkit/bench.hpp"
#include "splitkit/error.hpp"
#include "splitkit/reference.hpp"

using namespace splitkit;

TEST_CASE("speedup is undefined at the edges") {
  CHECK(speedup(0.25, 0.5) == doctest::Approx(2.0));
  CHECK(speedup(2.0, 4.0) == doctest::Approx(0.5));
  CHECK(std::isnan(speedup(0.0, 0.5)));
  CHECK(std::isnan(speedup(0.5, 1.0)));
  CHECK(std::isnan(speedup(0.5, 0.0)));
  CHECK(std::isnan(speedup(NAN, 0.5)));
  CHECK(std::isnan(speedup(0.5, INFINITY)));
}

TEST_CASE("moments use the population deviation") {
  const Moments m = moments({2, 4, 4, 4, 5, 5, 7, 9});
  CHECK(m.mean == 5.0);
  CHECK(m.sd == 2.0);
  CHECK(m.count == 8);
  std::vector<double> many(10001, 0.1);
  CHECK(moments(many).mean == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(moments({}).count == 0);
}

TEST_CASE("phi grid") {
  const auto g = phi_grid(1.0, 20.0, 0.5);
  CHECK(g.size() == 39);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 20.0);
  CHECK(phi_grid(1.0, 1.0, 0.5).size() == 1);
  CHECK_THROWS_AS(phi_grid(1.0, 2.0, 0.0), Error);
  CHECK_THROWS_AS(phi_grid(2.0, 1.0, 0.5), Error);
}

TEST_CASE("table method set") {
  const auto t = table_methods();
  CHECK(t.size() == 11);
  CHECK(t.front().method == Method::Jacobi);
}

TEST_CASE("experiments do not depend on the thread count") {
  ExperimentConfig cfg;
  cfg.cls = MatrixClass::Class1;
  cfg.n = 20;
  cfg.trials = 6;
  cfg.seed = 5;
  cfg.methods = {{Method::Jacobi, {}}, {Method::FGS, {}}, {Method::AFTC_L, {}}};
  cfg.threads = 1;
  const ExperimentReport one = run_experiment(cfg);
  cfg.threads = 4;
  const ExperimentReport four = run_experiment(cfg);
  REQUIRE(one.stats.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(one.stats[k].rho.mean == four.stats[k].rho.mean);
    CHECK(one.stats[k].speedup.sd == four.stats[k].speedup.sd);
  }
  CHECK(experiment_csv(one) == experiment_csv(four));
  CHECK(experiment_csv(one).rfind("method,trials,mean_rho,sd_rho,mean_speedup,sd_speedup", 0) == 0);
  // Trial t is an ordinary generator draw with seed + t.
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    CHECK(one.trials[t].seed == cfg.seed + t);
    const NormalizedSystem ns = normalize(generate({cfg.cls, cfg.n, cfg.phi, cfg.seed + t}));
    CHECK(one.trials[t].rho[1] == doctest::Approx(method_spectral_radius(ns, {Method::FGS, {}}).rho).epsilon(1e-12));
  }
  // Jacobi speedup is one by definition.
  CHECK(one.stats[0].speedup.mean == doctest::Approx(1.0));
}

TEST_CASE("phi sweep rescales one draw") {
  PhiSweepConfig cfg;
  cfg.n = 15;
  cfg.phis = {0.5, 1.0, 2.0};
  cfg.methods = {{Method::Jacobi, {}}};
  const PhiSweepReport r = run_phi_sweep(cfg);
  REQUIRE(r.rho.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.rho[i][0] == doctest::Approx(cfg.phis[i]).epsilon(1e-8));
  CHECK(phi_sweep_csv(r).rfind("phi,Jacobi\n", 0) == 0);
}

TEST_CASE("reference tables are readable") {
  const CsvTable t = read_csv_table(std::string(SPLITKIT_TEST_TABLE_DIR) + "/bspline_n100.csv");
  CHECK(!t.rows.empty());
  CHECK_NOTHROW(t.column("method"));
  CHECK_THROWS_AS(read_csv_table("/nonexistent.csv"), Error);
}
