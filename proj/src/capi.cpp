#include "splitkit/splitkit.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "splitkit/bench.hpp"
#include "splitkit/catalog.hpp"
#include "splitkit/engine.hpp"
#include "splitkit/error.hpp"
#include "splitkit/genmat.hpp"
#include "splitkit/linalg.hpp"
#include "splitkit/reference.hpp"
#include "splitkit/spectral.hpp"
#include "splitkit/splitting.hpp"

#ifndef SPLITKIT_DEFAULT_TABLE_DIR
#define SPLITKIT_DEFAULT_TABLE_DIR "reference_tables"
#endif

using namespace splitkit;

struct sk_matrix {
  Matrix m;
};

struct sk_vector {
  Vector v;
};

struct sk_system {
  LinearSystem sys;
  NormalizedSystem ns;
  std::shared_ptr<const Matrix> jacobi;
};

struct sk_splitting {
  Splitting s;
};

struct sk_experiment {
  ExperimentReport rep;
};

struct sk_sweep {
  PhiSweepReport rep;
};

namespace {

thread_local std::string last_error;

sk_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
      return SK_E_INVALID_ARGUMENT;
    case ErrorCode::ShapeMismatch:
      return SK_E_SHAPE;
    case ErrorCode::ZeroDiagonal:
      return SK_E_ZERO_DIAGONAL;
    case ErrorCode::Parse:
      return SK_E_PARSE;
    case ErrorCode::Io:
      return SK_E_IO;
    case ErrorCode::CapExceeded:
      return SK_E_CAP_EXCEEDED;
    case ErrorCode::Diverged:
      return SK_E_DIVERGED;
    case ErrorCode::NotConverged:
      return SK_E_NOT_CONVERGED;
    case ErrorCode::Internal:
      return SK_E_INTERNAL;
  }
  return SK_E_INTERNAL;
}

template <class F>
sk_status guard(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SK_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SK_E_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

MethodSpec to_spec(const sk_method_spec* spec) {
  require(spec != nullptr, "method spec is null");
  require(spec->method >= 0 && static_cast<std::size_t>(spec->method) < all_methods().size(), "unknown method index");
  MethodSpec m{all_methods()[static_cast<std::size_t>(spec->method)], {}};
  if (spec->block_split) m.params.block_split = spec->block_split;
  if (spec->amks_blocks) m.params.amks_blocks = spec->amks_blocks;
  return m;
}

sk_method_spec from_spec(const MethodSpec& m) {
  sk_method_spec out{};
  for (std::size_t i = 0; i < all_methods().size(); ++i)
    if (all_methods()[i] == m.method) out.method = static_cast<int>(i);
  out.block_split = m.params.block_split.value_or(0);
  out.amks_blocks = m.params.amks_blocks.value_or(0);
  return out;
}

std::vector<MethodSpec> to_specs(const sk_method_spec* methods, std::size_t count) {
  if (!methods) return table_methods();
  std::vector<MethodSpec> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(to_spec(methods + i));
  return out;
}

SpectralOptions to_options(const sk_spectral_options* opts) {
  SpectralOptions o;
  if (!opts) return o;
  if (opts->tolerance > 0.0) o.tolerance = opts->tolerance;
  if (opts->dense_cap > 0) o.dense_cap = opts->dense_cap;
  switch (opts->backend) {
    case SK_BACKEND_AUTO:
      o.backend = SpectralBackend::Auto;
      break;
    case SK_BACKEND_DENSE:
      o.backend = SpectralBackend::Dense;
      break;
    case SK_BACKEND_KRYLOV:
      o.backend = SpectralBackend::Krylov;
      break;
    case SK_BACKEND_POWER:
      o.backend = SpectralBackend::PowerGrowth;
      break;
    default:
      fail(ErrorCode::InvalidArgument, "unknown backend");
  }
  return o;
}

void fill_result(const SpectralReport& r, sk_spectral_result* out) {
  *out = sk_spectral_result{};
  out->rho = r.rho;
  std::strncpy(out->backend, r.method.c_str(), sizeof out->backend - 1);
  out->iterations = r.iterations;
  out->residual_estimate = r.residual_estimate;
  out->converged = r.converged;
  out->nilpotent = r.nilpotent;
}

MatrixClass to_class(sk_matrix_class c) {
  switch (c) {
    case SK_CLASS_1:
      return MatrixClass::Class1;
    case SK_CLASS_2:
      return MatrixClass::Class2;
    case SK_CLASS_3:
      return MatrixClass::Class3;
    case SK_CLASS_BSPLINE:
      return MatrixClass::BSpline;
    default:
      fail(ErrorCode::InvalidArgument, "class not valid here");
  }
}

sk_system* make_system(LinearSystem sys) {
  NormalizedSystem ns = normalize(sys);
  auto jac = std::make_shared<const Matrix>(jacobi_matrix(ns));
  return new sk_system{std::move(sys), std::move(ns), std::move(jac)};
}

}  // namespace

extern "C" {

const char* sk_version(void) { return "1.0.0"; }

const char* sk_last_error(void) { return last_error.c_str(); }

const char* sk_status_string(sk_status status) {
  switch (status) {
    case SK_OK:
      return "ok";
    case SK_E_INVALID_ARGUMENT:
      return "invalid argument";
    case SK_E_SHAPE:
      return "shape mismatch";
    case SK_E_ZERO_DIAGONAL:
      return "zero diagonal";
    case SK_E_PARSE:
      return "parse error";
    case SK_E_IO:
      return "i/o error";
    case SK_E_CAP_EXCEEDED:
      return "dense cap exceeded";
    case SK_E_DIVERGED:
      return "diverged";
    case SK_E_NOT_CONVERGED:
      return "not converged";
    case SK_E_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void sk_string_free(char* s) { std::free(s); }

sk_status sk_matrix_create(size_t rows, size_t cols, const double* row_major, sk_matrix** out) {
  return guard([&] {
    require(out != nullptr, "output handle is null");
    require(row_major != nullptr || rows * cols == 0, "matrix data is null");
    *out = new sk_matrix{Matrix(rows, cols, std::vector<double>(row_major, row_major + rows * cols))};
    return SK_OK;
  });
}

sk_status sk_matrix_read(const char* path, sk_matrix** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new sk_matrix{read_matrix_file(path)};
    return SK_OK;
  });
}

sk_status sk_matrix_write(const sk_matrix* m, const char* path) {
  return guard([&] {
    require(m && path, "null argument");
    write_matrix_file(path, m->m);
    return SK_OK;
  });
}

size_t sk_matrix_rows(const sk_matrix* m) { return m ? m->m.rows() : 0; }
size_t sk_matrix_cols(const sk_matrix* m) { return m ? m->m.cols() : 0; }
const double* sk_matrix_data(const sk_matrix* m) { return m ? m->m.data().data() : nullptr; }
void sk_matrix_free(sk_matrix* m) { delete m; }

sk_status sk_vector_create(size_t len, const double* data, sk_vector** out) {
  return guard([&] {
    require(out != nullptr, "output handle is null");
    require(data != nullptr || len == 0, "vector data is null");
    *out = new sk_vector{Vector(data, data + len)};
    return SK_OK;
  });
}

sk_status sk_vector_read(const char* path, sk_vector** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new sk_vector{read_vector_file(path)};
    return SK_OK;
  });
}

sk_status sk_vector_write(const sk_vector* v, const char* path) {
  return guard([&] {
    require(v && path, "null argument");
    write_vector_file(path, v->v);
    return SK_OK;
  });
}

size_t sk_vector_len(const sk_vector* v) { return v ? v->v.size() : 0; }
const double* sk_vector_data(const sk_vector* v) { return v ? v->v.data() : nullptr; }
void sk_vector_free(sk_vector* v) { delete v; }

sk_status sk_matrix_class_parse(const char* name, sk_matrix_class* out) {
  return guard([&] {
    require(name && out, "null argument");
    const std::string s = name;
    if (s == "unit-radius-3") {
      *out = SK_EXAMPLE_UNIT_RADIUS_3;
    } else if (s == "exchange-2") {
      *out = SK_EXAMPLE_EXCHANGE_2;
    } else {
      switch (parse_matrix_class(s)) {
        case MatrixClass::Class1:
          *out = SK_CLASS_1;
          break;
        case MatrixClass::Class2:
          *out = SK_CLASS_2;
          break;
        case MatrixClass::Class3:
          *out = SK_CLASS_3;
          break;
        case MatrixClass::BSpline:
          *out = SK_CLASS_BSPLINE;
          break;
      }
    }
    return SK_OK;
  });
}

sk_status sk_system_create(const sk_matrix* a, const sk_vector* rhs, sk_system** out) {
  return guard([&] {
    require(a && out, "null argument");
    LinearSystem sys{a->m, {}};
    if (rhs) {
      sys.b = rhs->v;
    } else {
      if (a->m.cols() == 0 || !a->m.square()) fail(ErrorCode::ShapeMismatch, "coefficient matrix is not square");
      sys.b = a->m * Vector(a->m.cols(), 1.0);
    }
    *out = make_system(std::move(sys));
    return SK_OK;
  });
}

sk_status sk_system_generate(const sk_generator_config* cfg, sk_system** out) {
  return guard([&] {
    require(cfg && out, "null argument");
    if (cfg->cls == SK_EXAMPLE_UNIT_RADIUS_3) {
      *out = make_system(builtin_example_system(BuiltinExample::UnitRadius3));
    } else if (cfg->cls == SK_EXAMPLE_EXCHANGE_2) {
      *out = make_system(builtin_example_system(BuiltinExample::Exchange2));
    } else {
      *out = make_system(generate({to_class(cfg->cls), cfg->n, cfg->phi, cfg->seed}));
    }
    return SK_OK;
  });
}

size_t sk_system_size(const sk_system* s) { return s ? s->ns.size() : 0; }

sk_status sk_system_matrix(const sk_system* s, sk_matrix** out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = new sk_matrix{s->sys.a};
    return SK_OK;
  });
}

sk_status sk_system_rhs(const sk_system* s, sk_vector** out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = new sk_vector{s->sys.b};
    return SK_OK;
  });
}

sk_status sk_system_jacobi(const sk_system* s, sk_matrix** out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = new sk_matrix{*s->jacobi};
    return SK_OK;
  });
}

void sk_system_free(sk_system* s) { delete s; }

size_t sk_method_count(void) { return all_methods().size(); }

const char* sk_method_name(size_t i) {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (Method m : all_methods()) v.push_back(method_name(m));
    return v;
  }();
  return i < names.size() ? names[i].c_str() : nullptr;
}

sk_status sk_method_parse(const char* name, sk_method_spec* out) {
  return guard([&] {
    require(name && out, "null argument");
    *out = from_spec(parse_method(name));
    return SK_OK;
  });
}

sk_status sk_method_label(const sk_method_spec* spec, char** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = dup_string(method_label(to_spec(spec)));
    return SK_OK;
  });
}

sk_status sk_splitting_build(const sk_system* s, const sk_method_spec* spec, sk_splitting** out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = new sk_splitting{build(s->ns, to_spec(spec), s->jacobi)};
    return SK_OK;
  });
}

sk_status sk_splitting_read(const sk_system* s, const char* path, sk_splitting** out) {
  return guard([&] {
    require(s && path && out, "null argument");
    *out = new sk_splitting{apply_mask(read_splitting_mask_file(path), s->jacobi)};
    return SK_OK;
  });
}

sk_status sk_splitting_write(const sk_splitting* sp, const char* path) {
  return guard([&] {
    require(sp && path, "null argument");
    std::ofstream f(path);
    if (!f) fail(ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    write_splitting_mask(f, sp->s);
    return SK_OK;
  });
}

size_t sk_splitting_order(const sk_splitting* sp) { return sp ? sp->s.order() : 0; }
int sk_splitting_equal(const sk_splitting* a, const sk_splitting* b) {
  if (!a || !b) return 0;
  return *a->s.source() == *b->s.source() && a->s.parts() == b->s.parts();
}

void sk_splitting_free(sk_splitting* sp) { delete sp; }

sk_status sk_splitting_properties(const sk_splitting* sp, double relative_zero, sk_order_properties* out) {
  return guard([&] {
    require(sp && out, "null argument");
    const ZeroTest zt{relative_zero};
    out->essential = is_essential(sp->s, zt);
    out->maximal = is_maximal(sp->s);
    out->potentially_optimal = out->essential && out->maximal;
    return SK_OK;
  });
}

sk_status sk_splitting_refines(const sk_splitting* fine, const sk_splitting* coarse, double relative_zero,
                               sk_refinement* out) {
  return guard([&] {
    require(fine && coarse && out, "null argument");
    const RefinementResult r = refines(fine->s, coarse->s, ZeroTest{relative_zero});
    *out = sk_refinement{};
    out->refines = r.refines;
    out->one_step = r.one_step;
    out->chain_length = r.chain_length;
    if (r.witness) {
      out->coarse_shift = r.witness->coarse_shift;
      out->fine_shift = r.witness->fine_shift;
      out->split_index = r.witness->split_index;
    }
    return SK_OK;
  });
}

void sk_spectral_options_default(sk_spectral_options* opts) {
  if (!opts) return;
  const SpectralOptions d;
  opts->tolerance = d.tolerance;
  opts->backend = SK_BACKEND_AUTO;
  opts->dense_cap = d.dense_cap;
}

sk_status sk_method_spectral_radius(const sk_system* s, const sk_method_spec* spec, const sk_spectral_options* opts,
                                    sk_spectral_result* out) {
  return guard([&] {
    require(s && out, "null argument");
    fill_result(method_spectral_radius(s->ns, to_spec(spec), to_options(opts), s->jacobi), out);
    return SK_OK;
  });
}

sk_status sk_splitting_spectral_radius(const sk_splitting* sp, const sk_spectral_options* opts,
                                       sk_spectral_result* out) {
  return guard([&] {
    require(sp && out, "null argument");
    fill_result(spectral_radius(BlockOperator(sp->s), to_options(opts)), out);
    return SK_OK;
  });
}

sk_status sk_splitting_block_inf_norm(const sk_splitting* sp, double* out) {
  return guard([&] {
    require(sp && out, "null argument");
    *out = block_inf_norm(BlockOperator(sp->s));
    return SK_OK;
  });
}

void sk_solve_config_default(sk_solve_config* cfg) {
  if (!cfg) return;
  const SolveConfig d;
  cfg->tolerance = d.tolerance;
  cfg->max_iters = d.max_iters;
  cfg->mode = SK_MODE_GENERAL;
}

sk_status sk_solve_mode_parse(const char* name, sk_solve_mode* out) {
  return guard([&] {
    require(name && out, "null argument");
    switch (parse_solve_mode(name)) {
      case SolveMode::General:
        *out = SK_MODE_GENERAL;
        break;
      case SolveMode::TwoStep:
        *out = SK_MODE_TWO_STEP;
        break;
      case SolveMode::ModifiedSGS:
        *out = SK_MODE_MODIFIED_SGS;
        break;
    }
    return SK_OK;
  });
}

sk_status sk_solve(const sk_system* s, const sk_method_spec* spec, const sk_solve_config* cfg,
                   sk_solve_result* result, sk_vector** solution) {
  return guard([&] {
    require(s && result, "null argument");
    SolveConfig c;
    if (cfg) {
      c.tolerance = cfg->tolerance;
      c.max_iters = cfg->max_iters;
      c.mode = cfg->mode == SK_MODE_TWO_STEP       ? SolveMode::TwoStep
               : cfg->mode == SK_MODE_MODIFIED_SGS ? SolveMode::ModifiedSGS
                                                   : SolveMode::General;
    }
    const SolveReport r = solve(s->sys, to_spec(spec), c);
    result->iterations = r.iterations;
    result->final_residual = r.final_residual;
    result->converged = r.converged;
    result->diverged = r.diverged;
    if (solution) *solution = new sk_vector{r.solution};
    if (r.converged) return SK_OK;
    last_error = r.diagnostic;
    return r.diverged ? SK_E_DIVERGED : SK_E_NOT_CONVERGED;
  });
}

sk_status sk_experiment_run(const sk_experiment_config* cfg, const sk_method_spec* methods, size_t count,
                            sk_experiment** out) {
  return guard([&] {
    require(cfg && out, "null argument");
    ExperimentConfig c;
    c.cls = to_class(cfg->cls);
    c.n = cfg->n;
    c.phi = cfg->phi;
    c.trials = cfg->trials;
    c.seed = cfg->seed;
    c.threads = cfg->threads;
    c.methods = to_specs(methods, count);
    *out = new sk_experiment{run_experiment(c)};
    return SK_OK;
  });
}

size_t sk_experiment_rows(const sk_experiment* e) { return e ? e->rep.stats.size() : 0; }

sk_status sk_experiment_row_get(const sk_experiment* e, size_t i, sk_experiment_row* out) {
  return guard([&] {
    require(e && out, "null argument");
    require(i < e->rep.stats.size(), "row index out of range");
    const MethodStats& st = e->rep.stats[i];
    *out = sk_experiment_row{st.rho.mean,  st.rho.sd,          st.speedup.mean, st.speedup.sd,
                             st.rho.count, st.speedup_excluded, st.failures};
    return SK_OK;
  });
}

sk_status sk_experiment_csv(const sk_experiment* e, char** out) {
  return guard([&] {
    require(e && out, "null argument");
    *out = dup_string(experiment_csv(e->rep));
    return SK_OK;
  });
}

sk_status sk_experiment_table(const sk_experiment* e, char** out) {
  return guard([&] {
    require(e && out, "null argument");
    *out = dup_string(experiment_table(e->rep));
    return SK_OK;
  });
}

void sk_experiment_free(sk_experiment* e) { delete e; }

sk_status sk_sweep_run(const sk_sweep_config* cfg, const sk_method_spec* methods, size_t count, sk_sweep** out) {
  return guard([&] {
    require(cfg && out, "null argument");
    PhiSweepConfig c;
    c.cls = to_class(cfg->cls);
    c.n = cfg->n;
    c.seed = cfg->seed;
    c.threads = cfg->threads;
    c.phis = phi_grid(cfg->phi_start, cfg->phi_stop, cfg->phi_step);
    c.methods = to_specs(methods, count);
    *out = new sk_sweep{run_phi_sweep(c)};
    return SK_OK;
  });
}

sk_status sk_sweep_csv(const sk_sweep* s, char** out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = dup_string(phi_sweep_csv(s->rep));
    return SK_OK;
  });
}

void sk_sweep_free(sk_sweep* s) { delete s; }

size_t sk_reproduce_target_count(void) { return reproduce_targets().size(); }

const char* sk_reproduce_target(size_t i) {
  return i < reproduce_targets().size() ? reproduce_targets()[i].c_str() : nullptr;
}

const char* sk_default_table_dir(void) {
  if (const char* env = std::getenv("SPLITKIT_REFERENCE_TABLES")) return env;
  return SPLITKIT_DEFAULT_TABLE_DIR;
}

sk_status sk_reproduce(const char* target, const sk_reproduce_options* opts, int* pass, char** report, char** csv) {
  return guard([&] {
    require(target && pass, "null argument");
    ReproduceOptions o;
    o.table_dir = opts && opts->table_dir ? opts->table_dir : sk_default_table_dir();
    if (opts) {
      if (opts->n) o.n = opts->n;
      if (opts->trials) o.trials = opts->trials;
      o.seed = opts->seed;
      o.threads = opts->threads;
    }
    const ReproduceResult r = reproduce(target, o);
    *pass = r.pass;
    if (report) *report = dup_string(r.report);
    if (csv) *csv = dup_string(r.csv);
    return SK_OK;
  });
}

}  // extern "C"
