// splitkit command line front end. Talks to the library only through the C
// interface in splitkit/splitkit.h.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "splitkit/splitkit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

// Raised for any failed library call; carries the exit code to use.
struct CliFailure {
  int code;
  std::string message;
};

int exit_code_for(sk_status s) {
  switch (s) {
    case SK_E_INVALID_ARGUMENT:
    case SK_E_PARSE:
    case SK_E_IO:
    case SK_E_SHAPE:
      return kExitUsage;
    default:
      return kExitNumerical;
  }
}

void check(sk_status s, const std::string& what) {
  if (s == SK_OK) return;
  std::string msg = what + ": " + sk_status_string(s);
  if (*sk_last_error()) msg += " (" + std::string(sk_last_error()) + ")";
  throw CliFailure{exit_code_for(s), msg};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using MatrixPtr = std::unique_ptr<sk_matrix, Deleter<sk_matrix, sk_matrix_free>>;
using VectorPtr = std::unique_ptr<sk_vector, Deleter<sk_vector, sk_vector_free>>;
using SystemPtr = std::unique_ptr<sk_system, Deleter<sk_system, sk_system_free>>;
using SplittingPtr = std::unique_ptr<sk_splitting, Deleter<sk_splitting, sk_splitting_free>>;
using ExperimentPtr = std::unique_ptr<sk_experiment, Deleter<sk_experiment, sk_experiment_free>>;
using SweepPtr = std::unique_ptr<sk_sweep, Deleter<sk_sweep, sk_sweep_free>>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  sk_string_free(s);
  return out;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw CliFailure{kExitUsage, "cannot open '" + path + "' for writing"};
  std::fputs(text.c_str(), f);
  std::fclose(f);
}

SystemPtr load_system(const std::string& matrix, const std::string& rhs) {
  sk_matrix* a = nullptr;
  check(sk_matrix_read(matrix.c_str(), &a), "reading " + matrix);
  MatrixPtr ap(a);
  VectorPtr bp;
  if (!rhs.empty()) {
    sk_vector* b = nullptr;
    check(sk_vector_read(rhs.c_str(), &b), "reading " + rhs);
    bp.reset(b);
  }
  sk_system* s = nullptr;
  check(sk_system_create(ap.get(), bp.get(), &s), "building system");
  return SystemPtr(s);
}

sk_method_spec parse_method(const std::string& name) {
  sk_method_spec m{};
  check(sk_method_parse(name.c_str(), &m), "method '" + name + "'");
  return m;
}

std::string method_label(const sk_method_spec& m) {
  char* s = nullptr;
  check(sk_method_label(&m, &s), "method label");
  return take_string(s);
}

// "table" is the standard comparison set (NULL to the library), "all" the
// whole catalog, anything else a list of names.
std::vector<sk_method_spec> parse_method_list(const std::vector<std::string>& names, bool& use_table) {
  use_table = false;
  std::vector<sk_method_spec> out;
  if (names.size() == 1 && names[0] == "table") {
    use_table = true;
    return out;
  }
  if (names.size() == 1 && names[0] == "all") {
    for (std::size_t i = 0; i < sk_method_count(); ++i) out.push_back(parse_method(sk_method_name(i)));
    return out;
  }
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

sk_matrix_class parse_class(const std::string& name) {
  sk_matrix_class c{};
  check(sk_matrix_class_parse(name.c_str(), &c), "class '" + name + "'");
  return c;
}

// One line on stderr that reproduces the invocation with every default
// filled in.
void print_resolved(const CLI::App& sub) {
  std::ostringstream line;
  line << "# resolved: splitkit " << sub.get_name();
  for (const CLI::Option* o : sub.get_options()) {
    if (o->get_name() == "--help") continue;
    std::string value;
    if (o->count() > 0) {
      for (const auto& r : o->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = o->get_default_str();
    }
    if (value.empty()) continue;
    if (o->get_positional())
      line << ' ' << value;
    else
      line << ' ' << o->get_name() << ' ' << value;
  }
  std::cerr << line.str() << '\n';
}

// ---- gen ----

struct GenArgs {
  std::string cls = "1";
  std::size_t n = 100;
  double phi = 0.9;
  std::uint64_t seed = 42;
  std::string out = "-";
  std::string rhs_out;
};

std::string matrix_text(const sk_matrix* m) {
  std::ostringstream out;
  out.precision(17);
  const std::size_t r = sk_matrix_rows(m), c = sk_matrix_cols(m);
  const double* d = sk_matrix_data(m);
  out << r << ' ' << c << '\n';
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out << (j ? " " : "") << d[i * c + j];
    out << '\n';
  }
  return out.str();
}

int run_gen(const GenArgs& a) {
  sk_generator_config cfg{parse_class(a.cls), a.n, a.phi, a.seed};
  sk_system* s = nullptr;
  check(sk_system_generate(&cfg, &s), "generating matrix");
  SystemPtr sys(s);
  sk_matrix* m = nullptr;
  check(sk_system_matrix(sys.get(), &m), "extracting matrix");
  MatrixPtr mp(m);
  if (a.out == "-")
    std::cout << matrix_text(mp.get());
  else
    check(sk_matrix_write(mp.get(), a.out.c_str()), "writing " + a.out);
  if (!a.rhs_out.empty()) {
    sk_vector* b = nullptr;
    check(sk_system_rhs(sys.get(), &b), "extracting right-hand side");
    VectorPtr bp(b);
    check(sk_vector_write(bp.get(), a.rhs_out.c_str()), "writing " + a.rhs_out);
  }
  return kExitOk;
}

// ---- solve ----

struct SolveArgs {
  std::string matrix;
  std::string rhs;
  std::string method = "SGS";
  double tol = 1e-10;
  std::size_t max_iters = 100000;
  std::string mode = "general";
  std::string out = "solution.txt";
};

int run_solve(const SolveArgs& a) {
  SystemPtr sys = load_system(a.matrix, a.rhs);
  const sk_method_spec m = parse_method(a.method);
  sk_solve_config cfg;
  sk_solve_config_default(&cfg);
  cfg.tolerance = a.tol;
  cfg.max_iters = a.max_iters;
  check(sk_solve_mode_parse(a.mode.c_str(), &cfg.mode), "mode");
  sk_solve_result r{};
  sk_vector* x = nullptr;
  const sk_status st = sk_solve(sys.get(), &m, &cfg, &r, &x);
  VectorPtr xp(x);
  if (st != SK_OK && st != SK_E_DIVERGED && st != SK_E_NOT_CONVERGED) check(st, "solve");
  std::cout << "method " << method_label(m) << '\n'
            << "iterations " << r.iterations << '\n'
            << "residual " << fmt(r.final_residual) << '\n'
            << "status " << (r.converged ? "converged" : r.diverged ? "diverged" : "not converged") << '\n';
  if (xp && r.converged) {
    check(sk_vector_write(xp.get(), a.out.c_str()), "writing " + a.out);
    std::cout << "solution " << a.out << '\n';
  }
  if (st != SK_OK) std::cerr << "splitkit: " << sk_last_error() << '\n';
  return r.converged ? kExitOk : kExitNumerical;
}

// ---- spectra ----

struct SpectraArgs {
  std::string matrix;
  std::vector<std::string> methods{"table"};
  std::vector<std::string> splittings;
  double tol = 1e-8;
  std::string backend = "auto";
  std::size_t dense_cap = 600;
  std::string format = "csv";
};

sk_backend parse_backend(const std::string& s) {
  if (s == "auto") return SK_BACKEND_AUTO;
  if (s == "dense") return SK_BACKEND_DENSE;
  if (s == "krylov") return SK_BACKEND_KRYLOV;
  if (s == "power") return SK_BACKEND_POWER;
  throw CliFailure{kExitUsage, "unknown backend '" + s + "'"};
}

int run_spectra(const SpectraArgs& a) {
  SystemPtr sys = load_system(a.matrix, "");
  sk_spectral_options opts;
  sk_spectral_options_default(&opts);
  opts.tolerance = a.tol;
  opts.backend = parse_backend(a.backend);
  opts.dense_cap = a.dense_cap;

  struct Row {
    std::string label;
    sk_spectral_result r{};
    std::string error;
  };
  std::vector<Row> rows;
  int code = kExitOk;
  auto record = [&](Row row, sk_status st) {
    if (st != SK_OK) {
      row.error = std::string(sk_status_string(st)) + ": " + sk_last_error();
      std::cerr << "splitkit: " << row.label << ": " << row.error << '\n';
      code = std::max(code, exit_code_for(st));
    }
    rows.push_back(std::move(row));
  };

  if (a.splittings.empty()) {
    bool table = false;
    std::vector<sk_method_spec> methods = parse_method_list(a.methods, table);
    if (table) {
      const char* names[] = {"Jacobi", "TU", "FGS", "BGS", "TC22", "TR22", "SGS", "AFTC_L", "AFTC_U", "AFTR_L", "AFTR_U"};
      for (const char* n : names) methods.push_back(parse_method(n));
    }
    for (const sk_method_spec& m : methods) {
      Row row;
      row.label = method_label(m);
      const sk_status st = sk_method_spectral_radius(sys.get(), &m, &opts, &row.r);
      record(std::move(row), st);
    }
  } else {
    for (const std::string& path : a.splittings) {
      Row row;
      row.label = path;
      sk_splitting* sp = nullptr;
      sk_status st = sk_splitting_read(sys.get(), path.c_str(), &sp);
      SplittingPtr spp(sp);
      if (st == SK_OK) st = sk_splitting_spectral_radius(spp.get(), &opts, &row.r);
      record(std::move(row), st);
    }
  }

  if (a.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const Row& row : rows) {
      nlohmann::json e{{"method", row.label}};
      if (row.error.empty()) {
        e["rho"] = row.r.rho;
        e["backend"] = row.r.backend;
        e["iters"] = row.r.iterations;
        e["converged"] = static_cast<bool>(row.r.converged);
        e["nilpotent"] = static_cast<bool>(row.r.nilpotent);
        e["residual_estimate"] = row.r.residual_estimate;
      } else {
        e["error"] = row.error;
      }
      j.push_back(e);
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "method,rho,backend,iters,converged\n";
    for (const Row& row : rows) {
      if (row.error.empty())
        std::cout << row.label << ',' << fmt(row.r.rho) << ',' << row.r.backend << ',' << row.r.iterations << ','
                  << (row.r.converged ? "true" : "false") << '\n';
      else
        std::cout << row.label << ",nan,error,0,false\n";
    }
  }
  return code;
}

// ---- order ----

struct OrderArgs {
  std::string matrix;
  std::string a;
  std::string b;
  double relative_zero = 0.0;
};

struct NamedSplitting {
  std::string label;
  SplittingPtr sp;
};

// A readable file is a splitting description, anything else a method name.
NamedSplitting resolve_splitting(const sk_system* sys, const std::string& arg) {
  sk_splitting* sp = nullptr;
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    check(sk_splitting_read(sys, arg.c_str(), &sp), "reading " + arg);
    return {arg, SplittingPtr(sp)};
  }
  const sk_method_spec m = parse_method(arg);
  check(sk_splitting_build(sys, &m, &sp), "building " + arg);
  return {method_label(m), SplittingPtr(sp)};
}

const char* yes_no(int v) { return v ? "true" : "false"; }

void print_properties(const NamedSplitting& s, double rz, bool prefix) {
  sk_order_properties p{};
  check(sk_splitting_properties(s.sp.get(), rz, &p), "properties");
  if (prefix) std::cout << s.label << " (order " << sk_splitting_order(s.sp.get()) << "): ";
  std::cout << "essential: " << yes_no(p.essential) << ", maximal: " << yes_no(p.maximal)
            << ", potentially optimal: " << yes_no(p.potentially_optimal) << '\n';
}

void print_refinement(const NamedSplitting& fine, const NamedSplitting& coarse, const sk_refinement& r) {
  std::cout << fine.label << " ≻ " << coarse.label;
  if (r.one_step)
    std::cout << " (witness r=" << r.coarse_shift << ", s=" << r.fine_shift << ", split index " << r.split_index
              << ")\n";
  else
    std::cout << " (chain of " << r.chain_length << " refinement steps)\n";
}

int run_order(const OrderArgs& a) {
  SystemPtr sys = load_system(a.matrix, "");
  const NamedSplitting sa = resolve_splitting(sys.get(), a.a);
  if (a.b.empty()) {
    print_properties(sa, a.relative_zero, false);
    return kExitOk;
  }
  const NamedSplitting sb = resolve_splitting(sys.get(), a.b);
  sk_refinement ab{}, ba{};
  check(sk_splitting_refines(sa.sp.get(), sb.sp.get(), a.relative_zero, &ab), "refinement test");
  check(sk_splitting_refines(sb.sp.get(), sa.sp.get(), a.relative_zero, &ba), "refinement test");
  if (ab.refines)
    print_refinement(sa, sb, ab);
  else if (ba.refines)
    print_refinement(sb, sa, ba);
  else if (sk_splitting_equal(sa.sp.get(), sb.sp.get()))
    std::cout << "not comparable (irreflexive)\n";
  else
    std::cout << "not comparable\n";
  print_properties(sa, a.relative_zero, true);
  print_properties(sb, a.relative_zero, true);
  return kExitOk;
}

// ---- bench / sweep / reproduce ----

struct BenchArgs {
  std::string cls = "1";
  std::size_t n = 100;
  double phi = 0.9;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> methods{"table"};
  std::size_t threads = 0;
  std::string out = "-";
};

int run_bench(const BenchArgs& a) {
  bool table = false;
  const std::vector<sk_method_spec> methods = parse_method_list(a.methods, table);
  sk_experiment_config cfg{parse_class(a.cls), a.n, a.phi, a.trials, a.seed, a.threads};
  sk_experiment* e = nullptr;
  check(sk_experiment_run(&cfg, table ? nullptr : methods.data(), methods.size(), &e), "experiment");
  ExperimentPtr ep(e);
  char* csv = nullptr;
  check(sk_experiment_csv(ep.get(), &csv), "report");
  write_text(a.out, take_string(csv));
  if (a.out != "-") {
    char* tbl = nullptr;
    check(sk_experiment_table(ep.get(), &tbl), "report");
    std::cerr << take_string(tbl);
  }
  return kExitOk;
}

struct SweepArgs {
  std::string cls = "3";
  std::size_t n = 100;
  std::uint64_t seed = 0;
  double start = 1.0;
  double stop = 20.0;
  double step = 0.5;
  std::vector<std::string> methods{"TU", "FGS", "BGS", "SGS", "AFTC_L", "AFTR_L"};
  std::size_t threads = 0;
  std::string out = "-";
};

int run_sweep(const SweepArgs& a) {
  bool table = false;
  const std::vector<sk_method_spec> methods = parse_method_list(a.methods, table);
  sk_sweep_config cfg{parse_class(a.cls), a.n, a.seed, a.start, a.stop, a.step, a.threads};
  sk_sweep* s = nullptr;
  check(sk_sweep_run(&cfg, table ? nullptr : methods.data(), methods.size(), &s), "phi sweep");
  SweepPtr sp(s);
  char* csv = nullptr;
  check(sk_sweep_csv(sp.get(), &csv), "report");
  write_text(a.out, take_string(csv));
  return kExitOk;
}

struct ReproduceArgs {
  std::vector<std::string> targets{"all"};
  std::string tables;
  std::size_t n = 100;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string csv_dir;
};

int run_reproduce(const ReproduceArgs& a) {
  std::vector<std::string> targets = a.targets;
  if (targets.size() == 1 && targets[0] == "all") {
    targets.clear();
    for (std::size_t i = 0; i < sk_reproduce_target_count(); ++i) targets.emplace_back(sk_reproduce_target(i));
  }
  const sk_reproduce_options opts{a.tables.empty() ? nullptr : a.tables.c_str(), a.n, a.trials, a.seed, a.threads};
  bool all_pass = true;
  for (const std::string& t : targets) {
    int pass = 0;
    char* report = nullptr;
    char* csv = nullptr;
    check(sk_reproduce(t.c_str(), &opts, &pass, &report, &csv), "reproduce " + t);
    const std::string rep = take_string(report), data = take_string(csv);
    std::cout << "== " << t << " ==\n" << rep << "result: " << (pass ? "PASS" : "FAIL") << "\n\n";
    if (!a.csv_dir.empty()) write_text(a.csv_dir + "/" + t + ".csv", data);
    all_pass = all_pass && pass;
  }
  return all_pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Splitting-based stationary iterative methods: generate, solve, analyse and benchmark."};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string(sk_version()));

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a test matrix in the plain text format");
  g->add_option("--class", gen.cls, "1, 2, 3, bspline, unit-radius-3 or exchange-2")->capture_default_str();
  g->add_option("--n", gen.n, "Dimension")->capture_default_str();
  g->add_option("--phi", gen.phi, "Jacobi radius target for the random classes")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--out", gen.out, "Matrix file ('-' for stdout)")->capture_default_str();
  g->add_option("--rhs-out", gen.rhs_out, "Also write b = A 1 to this file");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run a method until the relative residual drops below --tol");
  s->add_option("--matrix", solve.matrix, "Coefficient matrix file")->required();
  s->add_option("--rhs", solve.rhs, "Right-hand side file (default b = A 1)");
  s->add_option("--method", solve.method, "Method name")->capture_default_str();
  s->add_option("--tol", solve.tol, "Relative residual target")->capture_default_str();
  s->add_option("--max-iters", solve.max_iters, "Iteration limit")->capture_default_str();
  s->add_option("--mode", solve.mode, "general, two-step or modified-sgs")
      ->check(CLI::IsMember({"general", "two-step", "modified-sgs"}))
      ->capture_default_str();
  s->add_option("--out", solve.out, "Solution file")->capture_default_str();

  SpectraArgs spectra;
  auto* sp = app.add_subcommand("spectra", "Spectral radius of block iteration operators");
  sp->add_option("--matrix", spectra.matrix, "Coefficient matrix file")->required();
  sp->add_option("--method", spectra.methods, "Comma separated names, 'table' or 'all'")
      ->delimiter(',')
      ->capture_default_str();
  sp->add_option("--splitting", spectra.splittings, "Splitting description files (replace --method)");
  sp->add_option("--tol", spectra.tol, "Eigenvalue tolerance")->capture_default_str();
  sp->add_option("--backend", spectra.backend, "auto, dense, krylov or power")
      ->check(CLI::IsMember({"auto", "dense", "krylov", "power"}))
      ->capture_default_str();
  sp->add_option("--dense-cap", spectra.dense_cap, "Largest operator handled densely")->capture_default_str();
  sp->add_option("--format", spectra.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  OrderArgs order;
  auto* o = app.add_subcommand("order", "Refinement order and essentiality of splittings");
  o->add_option("--matrix", order.matrix, "Coefficient matrix file")->required();
  o->add_option("--a", order.a, "Method name or splitting file")->required();
  o->add_option("--b", order.b, "Method name or splitting file to compare against");
  o->add_option("--relative-zero", order.relative_zero,
                "Products below this times |A||B| count as zero (0: exact)")
      ->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Random matrix experiment: radius and speedup statistics");
  b->add_option("--class", bench.cls, "1, 2, 3 or bspline")->capture_default_str();
  b->add_option("--n", bench.n, "Dimension")->capture_default_str();
  b->add_option("--phi", bench.phi, "Jacobi radius target")->capture_default_str();
  b->add_option("--trials", bench.trials, "Number of matrices")->capture_default_str();
  b->add_option("--seed", bench.seed, "Seed of the first trial")->capture_default_str();
  b->add_option("--methods", bench.methods, "'table', 'all' or a comma separated list")
      ->delimiter(',')
      ->capture_default_str();
  b->add_option("--threads", bench.threads, "Worker threads (0: automatic)")->capture_default_str();
  b->add_option("--out", bench.out, "CSV report ('-' for stdout)")->capture_default_str();

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "Spectral radius over a phi grid for one fixed draw");
  w->add_option("--class", sweep.cls, "1, 2 or 3")->capture_default_str();
  w->add_option("--n", sweep.n, "Dimension")->capture_default_str();
  w->add_option("--seed", sweep.seed, "Seed")->capture_default_str();
  w->add_option("--phi-start", sweep.start, "First phi")->capture_default_str();
  w->add_option("--phi-stop", sweep.stop, "Last phi")->capture_default_str();
  w->add_option("--phi-step", sweep.step, "Grid step")->capture_default_str();
  w->add_option("--methods", sweep.methods, "Comma separated list")->delimiter(',')->capture_default_str();
  w->add_option("--threads", sweep.threads, "Worker threads (0: automatic)")->capture_default_str();
  w->add_option("--out", sweep.out, "CSV output ('-' for stdout)")->capture_default_str();

  ReproduceArgs repro;
  auto* r = app.add_subcommand("reproduce", "Compare against the bundled reference tables");
  std::string targets_help = "Targets: all";
  for (std::size_t i = 0; i < sk_reproduce_target_count(); ++i) targets_help += std::string(", ") + sk_reproduce_target(i);
  r->add_option("targets", repro.targets, targets_help)->capture_default_str();
  r->add_option("--tables", repro.tables, std::string("Reference table directory (default ") + sk_default_table_dir() + ")");
  r->add_option("--n", repro.n, "Dimension for the random tables")->capture_default_str();
  r->add_option("--trials", repro.trials, "Trials for the random tables")->capture_default_str();
  r->add_option("--seed", repro.seed, "Seed of the first trial")->capture_default_str();
  r->add_option("--threads", repro.threads, "Worker threads (0: automatic)")->capture_default_str();
  r->add_option("--csv-dir", repro.csv_dir, "Write computed values as <target>.csv here");

  if (argc < 2) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) {
      print_resolved(*sub);
      if (sub == g) return run_gen(gen);
      if (sub == s) return run_solve(solve);
      if (sub == sp) return run_spectra(spectra);
      if (sub == o) return run_order(order);
      if (sub == b) return run_bench(bench);
      if (sub == w) return run_sweep(sweep);
      if (sub == r) return run_reproduce(repro);
    }
    std::cerr << app.help();
    return kExitUsage;
  } catch (const CliFailure& f) {
    std::cerr << "splitkit: " << f.message << '\n';
    return f.code;
  }
}
