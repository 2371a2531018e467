#include "splitkit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "splitkit/error.hpp"

namespace splitkit {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  fail(ErrorCode::Parse, "reference table has no column '" + name + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double cell_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::Parse, "bad number '" + s + "' in " + where);
  }
}

std::string line_fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string table_path(const ReproduceOptions& opts, const std::string& file) {
  if (opts.table_dir.empty()) fail(ErrorCode::InvalidArgument, "no reference table directory configured");
  return opts.table_dir + "/" + file;
}

struct Check {
  std::ostringstream report;
  bool pass = true;

  void compare(const std::string& label, double ours, double ref, double tol) {
    const bool ok = std::isfinite(ours) && std::fabs(ours - ref) <= tol;
    pass = pass && ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-28s ours %-14.8g reference %-14.8g tol %-9.3g %s\n", label.c_str(), ours, ref,
                  tol, ok ? "PASS" : "FAIL");
    report << buf;
  }
};

ReproduceResult reproduce_stats(MatrixClass cls, const std::string& file, const ReproduceOptions& opts) {
  const CsvTable ref = read_csv_table(table_path(opts, file));
  ExperimentConfig cfg;
  cfg.cls = cls;
  cfg.n = opts.n;
  cfg.phi = 0.9;
  cfg.trials = opts.trials;
  cfg.seed = opts.seed;
  cfg.threads = opts.threads;
  cfg.methods = table_methods();
  const ExperimentReport rep = run_experiment(cfg);
  Check chk;
  const std::size_t cm = ref.column("method"), cr = ref.column("mean_rho"), csd = ref.column("sd_rho"),
                    cs = ref.column("mean_speedup"), css = ref.column("sd_speedup");
  for (const auto& row : ref.rows) {
    const MethodSpec spec = parse_method(row[cm]);
    const auto it = std::find_if(rep.stats.begin(), rep.stats.end(),
                                 [&](const MethodStats& s) { return s.method.method == spec.method; });
    if (it == rep.stats.end()) fail(ErrorCode::Internal, "method missing from experiment: " + row[cm]);
    const double sd = cell_number(row[csd], file);
    chk.compare(row[cm] + " mean rho", it->rho.mean, cell_number(row[cr], file), std::max(sd, kReferenceFloor));
    if (cs < row.size() && !row[cs].empty()) {
      const double ssd = cell_number(row[css], file);
      chk.compare(row[cm] + " mean speedup", it->speedup.mean, cell_number(row[cs], file),
                  std::max(ssd, kReferenceFloor));
    }
  }
  return {chk.pass, chk.report.str(), experiment_csv(rep)};
}

ReproduceResult reproduce_bspline(const ReproduceOptions& opts) {
  const std::string file = "bspline_n100.csv";
  const CsvTable ref = read_csv_table(table_path(opts, file));
  const LinearSystem sys = generate({MatrixClass::BSpline, 100, 0.0, 0});
  const NormalizedSystem ns = normalize(sys);
  auto jacobi = std::make_shared<const Matrix>(jacobi_matrix(ns));
  Check chk;
  std::ostringstream csv;
  csv << "method,rho\n";
  const std::size_t cm = ref.column("method"), cr = ref.column("rho"), ct = ref.column("tolerance");
  for (const auto& row : ref.rows) {
    const MethodSpec spec = parse_method(row[cm]);
    const double rho = method_spectral_radius(ns, spec, {}, jacobi).rho;
    csv << row[cm] << ',' << line_fmt("%.10g", rho, 0, 0) << '\n';
    chk.compare(row[cm] + " rho", rho, cell_number(row[cr], file), cell_number(row[ct], file));
  }
  return {chk.pass, chk.report.str(), csv.str()};
}

ReproduceResult reproduce_phi_sweep(const ReproduceOptions& opts) {
  const std::string file = "phi_sweep_class3.csv";
  const CsvTable ref = read_csv_table(table_path(opts, file));
  const std::size_t cm = ref.column("method"), cp = ref.column("phi"), cr = ref.column("rho");
  std::vector<std::string> names;
  std::set<double> phis;
  for (const auto& row : ref.rows) {
    if (std::find(names.begin(), names.end(), row[cm]) == names.end()) names.push_back(row[cm]);
    phis.insert(cell_number(row[cp], file));
  }
  PhiSweepConfig cfg;
  cfg.cls = MatrixClass::Class3;
  cfg.n = opts.n;
  cfg.seed = opts.seed;
  cfg.threads = opts.threads;
  cfg.phis.assign(phis.begin(), phis.end());
  for (const auto& nm : names) cfg.methods.push_back(parse_method(nm));
  const PhiSweepReport rep = run_phi_sweep(cfg);
  std::ostringstream report;
  bool pass = true;
  report << "convergence pattern (rho < 1) against the reference; the phi = 2 column is binding\n";
  for (const auto& row : ref.rows) {
    const double phi = cell_number(row[cp], file);
    const double rref = cell_number(row[cr], file);
    const std::size_t i = static_cast<std::size_t>(std::find(cfg.phis.begin(), cfg.phis.end(), phi) - cfg.phis.begin());
    const std::size_t k = static_cast<std::size_t>(std::find(names.begin(), names.end(), row[cm]) - names.begin());
    const double ours = rep.rho[i][k];
    const bool same = (ours < 1.0) == (rref < 1.0);
    if (phi == 2.0) pass = pass && same;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-16s phi %-5g ours %-12.6g reference %-12.6g %s\n", row[cm].c_str(), phi, ours,
                  rref, same ? "same side" : (phi == 2.0 ? "FAIL" : "differs"));
    report << buf;
  }
  const double cf = crossing_phi(MatrixClass::Class3, opts.n, opts.seed, {Method::FGS, {}}, 1.0, 40.0);
  const double cb = crossing_phi(MatrixClass::Class3, opts.n, opts.seed, {Method::BGS, {}}, 1.0, 40.0);
  const double cs = crossing_phi(MatrixClass::Class3, opts.n, opts.seed, {Method::SGS, {}}, 1.0, 40.0);
  const bool sgs_last = cs > 0.0 && cs > cf && cs > cb;
  pass = pass && sgs_last;
  report << line_fmt("crossing phi: FGS %.6g  BGS %.6g  SGS %.6g", cf, cb, cs)
         << (sgs_last ? "  SGS crosses last: PASS\n" : "  SGS crosses last: FAIL\n");
  return {pass, report.str(), phi_sweep_csv(rep)};
}

}  // namespace

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open reference table '" + path + "'");
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else {
      cells.resize(t.header.size());
      t.rows.push_back(std::move(cells));
    }
  }
  if (t.header.empty()) fail(ErrorCode::Parse, "reference table '" + path + "' is empty");
  return t;
}

const std::vector<std::string>& reproduce_targets() {
  static const std::vector<std::string> t = {"class1-phi09", "class2-phi09", "class3-phi09", "bspline", "phi-sweep"};
  return t;
}

ReproduceResult reproduce(const std::string& target, const ReproduceOptions& opts) {
  if (target == "class1-phi09") return reproduce_stats(MatrixClass::Class1, "class1_phi09.csv", opts);
  if (target == "class2-phi09") return reproduce_stats(MatrixClass::Class2, "class2_phi09.csv", opts);
  if (target == "class3-phi09") return reproduce_stats(MatrixClass::Class3, "class3_phi09.csv", opts);
  if (target == "bspline") return reproduce_bspline(opts);
  if (target == "phi-sweep") return reproduce_phi_sweep(opts);
  fail(ErrorCode::InvalidArgument, "unknown reproduce target '" + target + "'");
}

double crossing_phi(MatrixClass cls, std::size_t n, std::uint64_t seed, const MethodSpec& method, double lo,
                    double hi) {
  auto rho_at = [&](double phi) {
    const NormalizedSystem ns = normalize(generate({cls, n, phi, seed}));
    return method_spectral_radius(ns, method).rho;
  };
  const double step = 0.25;
  double prev = lo;
  if (rho_at(lo) >= 1.0) return lo;
  for (double phi = lo + step; phi <= hi + 1e-12; phi += step) {
    if (rho_at(phi) >= 1.0) {
      double a = prev, b = phi;
      while (b - a > 1e-6) {
        const double mid = 0.5 * (a + b);
        (rho_at(mid) >= 1.0 ? b : a) = mid;
      }
      return b;
    }
    prev = phi;
  }
  return -1.0;
}

}  // namespace splitkit
