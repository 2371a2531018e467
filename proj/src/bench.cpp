#include "splitkit/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "splitkit/error.hpp"

namespace splitkit {

double speedup(double rho, double rho_jacobi) {
  if (!std::isfinite(rho) || !std::isfinite(rho_jacobi) || rho <= 0.0 || rho_jacobi <= 0.0 || rho_jacobi == 1.0)
    return std::numeric_limits<double>::quiet_NaN();
  return std::log(rho) / std::log(rho_jacobi);
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPLITKIT_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) t = std::min<std::size_t>(t, cap);
  }
  return std::max<std::size_t>(t, 1);
}

namespace {

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.count = xs.size();
  if (xs.empty()) {
    m.mean = m.sd = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  m.mean = pairwise_sum(xs.data(), xs.size()) / static_cast<double>(xs.size());
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - m.mean) * (xs[i] - m.mean);
  m.sd = std::sqrt(pairwise_sum(dev.data(), dev.size()) / static_cast<double>(xs.size()));
  return m;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.n == 0) fail(ErrorCode::InvalidArgument, "n must be positive");
  if (cfg.trials == 0) fail(ErrorCode::InvalidArgument, "trials must be positive");
  if (cfg.methods.empty()) fail(ErrorCode::InvalidArgument, "no methods selected");
  ExperimentReport rep;
  rep.config = cfg;
  rep.trials.resize(cfg.trials);
  const std::size_t nm = cfg.methods.size();
  parallel_for(cfg.trials, resolve_threads(cfg.threads), [&](std::size_t t) {
    TrialRecord& rec = rep.trials[t];
    rec.seed = cfg.seed + t;
    rec.rho.assign(nm, std::numeric_limits<double>::quiet_NaN());
    rec.converged.assign(nm, 0);
    const LinearSystem sys = generate({cfg.cls, cfg.n, cfg.phi, rec.seed});
    const NormalizedSystem ns = normalize(sys);
    auto jacobi = std::make_shared<const Matrix>(jacobi_matrix(ns));
    rec.rho_jacobi = spectral_radius(*jacobi, cfg.spectral).rho;
    for (std::size_t k = 0; k < nm; ++k) {
      try {
        const SpectralReport r = method_spectral_radius(ns, cfg.methods[k], cfg.spectral, jacobi);
        rec.rho[k] = r.rho;
        rec.converged[k] = r.converged;
      } catch (const Error&) {
        // Recorded as a failed trial for this method.
      }
    }
  });
  for (std::size_t k = 0; k < nm; ++k) {
    MethodStats st;
    st.method = cfg.methods[k];
    std::vector<double> rhos, sps;
    for (const TrialRecord& rec : rep.trials) {
      if (!std::isfinite(rec.rho[k]) || !rec.converged[k]) {
        ++st.failures;
        continue;
      }
      rhos.push_back(rec.rho[k]);
      const double sp = speedup(rec.rho[k], rec.rho_jacobi);
      if (std::isnan(sp))
        ++st.speedup_excluded;
      else
        sps.push_back(sp);
    }
    st.rho = moments(rhos);
    st.speedup = moments(sps);
    rep.stats.push_back(st);
  }
  return rep;
}

std::string experiment_csv(const ExperimentReport& rep) {
  std::ostringstream out;
  out << "method,trials,mean_rho,sd_rho,mean_speedup,sd_speedup,speedup_excluded,failures\n";
  for (const MethodStats& st : rep.stats)
    out << method_label(st.method) << ',' << st.rho.count << ',' << fmt(st.rho.mean) << ',' << fmt(st.rho.sd) << ','
        << fmt(st.speedup.mean) << ',' << fmt(st.speedup.sd) << ',' << st.speedup_excluded << ',' << st.failures
        << '\n';
  return out.str();
}

std::string experiment_table(const ExperimentReport& rep) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %12s %11s %12s %11s\n", "method", "mean rho", "sd rho", "mean speedup",
                "sd speedup");
  out << line;
  for (const MethodStats& st : rep.stats) {
    std::snprintf(line, sizeof line, "%-16s %12.6g %11.3g %12.6g %11.3g\n", method_label(st.method).c_str(),
                  st.rho.mean, st.rho.sd, st.speedup.mean, st.speedup.sd);
    out << line;
  }
  return out.str();
}

PhiSweepReport run_phi_sweep(const PhiSweepConfig& cfg) {
  if (cfg.phis.empty()) fail(ErrorCode::InvalidArgument, "empty phi grid");
  if (cfg.methods.empty()) fail(ErrorCode::InvalidArgument, "no methods selected");
  PhiSweepReport rep;
  rep.config = cfg;
  rep.rho.assign(cfg.phis.size(), std::vector<double>(cfg.methods.size(), std::numeric_limits<double>::quiet_NaN()));
  parallel_for(cfg.phis.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    // Same seed, so the off-diagonal draws are shared across the grid.
    const NormalizedSystem ns = normalize(generate({cfg.cls, cfg.n, cfg.phis[i], cfg.seed}));
    auto jacobi = std::make_shared<const Matrix>(jacobi_matrix(ns));
    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
      try {
        rep.rho[i][k] = method_spectral_radius(ns, cfg.methods[k], cfg.spectral, jacobi).rho;
      } catch (const Error&) {
      }
    }
  });
  return rep;
}

std::vector<double> phi_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(start > 0.0) || stop < start) fail(ErrorCode::InvalidArgument, "bad phi grid");
  std::vector<double> g;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) g.push_back(start + static_cast<double>(i) * step);
  return g;
}

std::string phi_sweep_csv(const PhiSweepReport& rep) {
  std::ostringstream out;
  out << "phi";
  for (const MethodSpec& m : rep.config.methods) out << ',' << method_label(m);
  out << '\n';
  for (std::size_t i = 0; i < rep.config.phis.size(); ++i) {
    out << fmt(rep.config.phis[i]);
    for (double r : rep.rho[i]) out << ',' << fmt(r);
    out << '\n';
  }
  return out.str();
}

std::vector<MethodSpec> table_methods() {
  std::vector<MethodSpec> out;
  for (Method m : {Method::Jacobi, Method::TU, Method::FGS, Method::BGS, Method::TC22, Method::TR22, Method::SGS,
                   Method::AFTC_L, Method::AFTC_U, Method::AFTR_L, Method::AFTR_U})
    out.push_back({m, {}});
  return out;
}

}  // namespace splitkit
