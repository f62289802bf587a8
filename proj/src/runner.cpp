#include "illposed/runner.hpp"

#include "illposed/bidiag.hpp"
#include "illposed/diagnostics.hpp"
#include "illposed/io.hpp"
#include "illposed/problems.hpp"
#include "illposed/selection.hpp"
#include "illposed/solvers.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace illposed {

namespace fs = std::filesystem;

namespace {

constexpr double kInequalityTol = 1e-8;

const std::vector<std::string> kKnownProblems = {"shaw", "wing", "heat", "phillips", "deriv2"};
const std::vector<std::string> kKnownMethods = {"tsvd", "lsqr", "hybrid"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct SummaryRow {
  std::string problem;
  double eps = 0.0;
  std::string method;
  int best_k = 0;
  double best_err = std::numeric_limits<double>::quiet_NaN();
  int lcurve_k = 0;
  double lcurve_err = std::numeric_limits<double>::quiet_NaN();
  double hybrid_gain = std::numeric_limits<double>::quiet_NaN();
};

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "problem,eps,method,best_k,best_err,lcurve_k,lcurve_err,hybrid_gain\n";
  for (const auto& r : rows) {
    os << r.problem << ',' << format_double(r.eps) << ',' << r.method << ',' << r.best_k << ','
       << format_double(r.best_err) << ',' << r.lcurve_k << ',' << format_double(r.lcurve_err)
       << ',' << format_double(r.hybrid_gain) << '\n';
  }
}

class Manifest {
 public:
  explicit Manifest(const RunSpec& spec) : start_(std::chrono::steady_clock::now()) {
    std::ostringstream os;
    os << "problem = " << spec.problem << '\n'
       << "n = " << spec.n << '\n'
       << "eps = " << format_double(spec.eps) << '\n'
       << "seed = " << spec.seed << '\n'
       << "kmax = " << spec.kmax << '\n'
       << "methods = ";
    for (std::size_t i = 0; i < spec.methods.size(); ++i) {
      os << (i ? "," : "") << spec.methods[i];
    }
    os << '\n' << "version = " << kLibraryVersion << '\n';
    head_ = os.str();
  }

  void add_file(const std::string& dir, const std::string& name) {
    files_.emplace_back(name, digest_hex(fnv1a64_file(dir + "/" + name)));
  }

  void write(const std::string& dir) const {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream os(dir + "/manifest.txt");
    os << head_ << "wall_seconds = " << format_double(wall) << '\n';
    for (const auto& [name, digest] : files_) {
      os << "file " << name << ' ' << digest << '\n';
    }
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::string head_;
  std::vector<std::pair<std::string, std::string>> files_;
};

NoisyInstance load_or_generate(const RunSpec& spec, Manifest* manifest) {
  const fs::path file = fs::path(spec.out) / "instance.bin";
  if (fs::exists(file)) {
    NoisyInstance inst = read_instance(file.string());
    if (inst.problem.name != spec.problem || inst.problem.A.rows() != spec.n ||
        inst.seed != spec.seed || inst.epsilon != spec.eps) {
      throw UsageError("instance.bin in '" + spec.out + "' was generated from a different spec");
    }
    return inst;
  }
  fs::create_directories(spec.out);
  NoisyInstance inst = add_noise(make_problem(spec.problem, spec.n), spec.eps, spec.seed);
  write_instance(file.string(), inst);
  if (manifest != nullptr) manifest->add_file(spec.out, "instance.bin");
  return inst;
}

Bidiagonalization factorize(const NoisyInstance& inst, int kmax) {
  // Run through the round-off floor; the diagnostics flag that regime
  // instead of stopping early.
  BidiagOptions opts;
  opts.breakdown_factor = 0.0;
  Bidiagonalization f = Bidiagonalization::start(inst.problem.A, inst.b(), opts);
  try {
    f.extend(kmax);
  } catch (const BreakdownError&) {
    // keep what completed; callers clamp kmax
  }
  return f;
}

struct MethodOutcome {
  std::string method;
  SolverPath path;
  int best_k = 0;
  double best_err = std::numeric_limits<double>::quiet_NaN();
  int lcurve_k = 0;
  double lcurve_err = std::numeric_limits<double>::quiet_NaN();
};

MethodOutcome summarize(const std::string& method, SolverPath path) {
  MethodOutcome out;
  out.method = method;
  out.best_k = oracle_best_k(path);
  out.best_err = (*path.relative_errors)[static_cast<std::size_t>(out.best_k - 1)];
  std::vector<double> lr, ls;
  for (int i = 0; i < path.kmax(); ++i) {
    lr.push_back(std::log(path.residual_norms[static_cast<std::size_t>(i)]));
    ls.push_back(std::log(path.solution_norms[static_cast<std::size_t>(i)]));
  }
  if (auto corner = try_lcurve_corner(lr, ls)) {
    out.lcurve_k = *corner + 1;
    out.lcurve_err = (*path.relative_errors)[static_cast<std::size_t>(*corner)];
  }
  out.path = std::move(path);
  return out;
}

std::vector<MethodOutcome> solve_all(const RunSpec& spec, const NoisyInstance& inst) {
  const Vector b = inst.b();
  const Vector* xt = &inst.problem.x_true;

  std::optional<Bidiagonalization> f;
  int kmax_krylov = spec.kmax;
  if (contains(spec.methods, "lsqr") || contains(spec.methods, "hybrid")) {
    f = factorize(inst, spec.kmax);
    kmax_krylov = std::min(spec.kmax, f->max_projected_k());
  }

  std::vector<MethodOutcome> outcomes;
  for (const std::string& m : spec.methods) {
    if (m == "tsvd") {
      const SvdTriplet dec = svd(inst.problem.A);
      outcomes.push_back(
          summarize(m, tsvd_path(dec, inst.problem.A, b, spec.kmax, xt)));
    } else if (m == "lsqr") {
      outcomes.push_back(summarize(m, lsqr_path(*f, b, kmax_krylov, xt)));
    } else {
      outcomes.push_back(
          summarize(m, hybrid_lsqr_path(*f, b, kmax_krylov, TruncationRule::lcurve(), xt)));
    }
  }
  return outcomes;
}

std::vector<SummaryRow> to_summary(const RunSpec& spec, const std::vector<MethodOutcome>& outs) {
  double gain = std::numeric_limits<double>::quiet_NaN();
  const MethodOutcome* lsqr = nullptr;
  const MethodOutcome* hybrid = nullptr;
  for (const auto& o : outs) {
    if (o.method == "lsqr") lsqr = &o;
    if (o.method == "hybrid") hybrid = &o;
  }
  if (lsqr != nullptr && hybrid != nullptr) gain = lsqr->best_err / hybrid->best_err;
  std::vector<SummaryRow> rows;
  for (const auto& o : outs) {
    rows.push_back(SummaryRow{spec.problem, spec.eps, o.method, o.best_k, o.best_err, o.lcurve_k,
                              o.lcurve_err, gain});
  }
  return rows;
}

int count_violations(const DiagnosticsTable& table) {
  const double tol = kInequalityTol * table.sigma1;
  int violations = 0;
  for (const auto& r : table.rows) {
    if (r.roundoff_flag) continue;
    if (r.sigma_next > r.gamma + tol) ++violations;
    if (r.alpha_next > r.gamma + tol) ++violations;
    if (r.gamma > r.bound_thm22_hi + tol) ++violations;
    if (std::abs(r.ritz_residual - r.alpha_next) > tol) ++violations;
  }
  return violations;
}

// diagnose core shared by run_diagnose and the sweep worker.
int diagnose_into(const RunSpec& spec, const NoisyInstance& inst, Manifest* manifest,
                  std::ostream& log) {
  const SvdTriplet dec = svd(inst.problem.A);
  Bidiagonalization f = factorize(inst, spec.kmax);
  const int kmax = std::min(spec.kmax, f.k());
  DiagnosticsTable table = build_table(inst, f, dec, kmax);
  write_diagnostics_csv((fs::path(spec.out) / "diagnostics.csv").string(), table);
  write_factorization((fs::path(spec.out) / "factorization.bin").string(), f);
  if (manifest != nullptr) {
    manifest->add_file(spec.out, "diagnostics.csv");
    manifest->add_file(spec.out, "factorization.bin");
  }
  const int violations = count_violations(table);
  log << "[diagnose] " << spec.problem << " n=" << spec.n << " eps=" << format_double(spec.eps)
      << " kmax=" << kmax << " violations=" << violations << '\n';
  return violations == 0 ? kExitOk : kExitInvariant;
}

std::vector<SummaryRow> run_one_for_sweep(const RunSpec& spec, std::ostream& log) {
  Manifest manifest(spec);
  NoisyInstance inst = load_or_generate(spec, &manifest);
  const std::vector<MethodOutcome> outs = solve_all(spec, inst);
  for (const auto& o : outs) {
    const std::string name = "path_" + o.method + ".csv";
    write_path_csv((fs::path(spec.out) / name).string(), o.path);
    manifest.add_file(spec.out, name);
  }
  const int diag = diagnose_into(spec, inst, &manifest, log);
  manifest.write(spec.out);
  if (diag != kExitOk) {
    throw std::runtime_error("theorem inequality violated for " + spec.problem);
  }
  return to_summary(spec, outs);
}

}  // namespace

void validate_spec(const RunSpec& spec) {
  if (!contains(kKnownProblems, spec.problem)) {
    throw UsageError("unknown problem '" + spec.problem + "'");
  }
  if (spec.n < 8) throw UsageError("n must be >= 8");
  if (!(spec.eps > 0.0 && spec.eps < 1.0)) throw UsageError("eps must lie in (0,1)");
  if (spec.kmax < 1 || spec.kmax > spec.n) throw UsageError("kmax must lie in [1, n]");
  if (spec.methods.empty()) throw UsageError("at least one method required");
  for (const auto& m : spec.methods) {
    if (!contains(kKnownMethods, m)) throw UsageError("unknown method '" + m + "'");
  }
  if (spec.out.empty()) throw UsageError("output directory required");
}

std::vector<std::string> split_methods(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

RunSpec parse_spec_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open spec file '" + path + "'");
  RunSpec spec;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("spec line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "problem") {
        spec.problem = value;
      } else if (key == "n") {
        spec.n = std::stoll(value);
      } else if (key == "eps") {
        spec.eps = std::stod(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "kmax") {
        spec.kmax = std::stoi(value);
      } else if (key == "methods") {
        spec.methods = split_methods(value);
      } else if (key == "out") {
        spec.out = value;
      } else if (key == "force") {
        spec.force = (value == "1" || value == "true");
      } else {
        throw UsageError("unknown spec key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("bad value for spec key '" + key + "': " + value);
    }
  }
  validate_spec(spec);
  return spec;
}

int run_generate(const RunSpec& spec) {
  validate_spec(spec);
  const fs::path file = fs::path(spec.out) / "instance.bin";
  if (fs::exists(file) && !spec.force) {
    throw UsageError("'" + file.string() + "' exists; pass --force to overwrite");
  }
  fs::create_directories(spec.out);
  Manifest manifest(spec);
  NoisyInstance inst = add_noise(make_problem(spec.problem, spec.n), spec.eps, spec.seed);
  write_instance(file.string(), inst);
  manifest.add_file(spec.out, "instance.bin");
  write_instance_csv((fs::path(spec.out) / "instance.csv").string(), inst);
  manifest.add_file(spec.out, "instance.csv");
  manifest.write(spec.out);
  std::cout << "[generate] " << spec.problem << " n=" << spec.n
            << " eps=" << format_double(spec.eps) << " seed=" << spec.seed << " -> "
            << file.string() << '\n';
  return kExitOk;
}

int run_solve(const RunSpec& spec) {
  validate_spec(spec);
  Manifest manifest(spec);
  NoisyInstance inst = load_or_generate(spec, &manifest);
  const std::vector<MethodOutcome> outs = solve_all(spec, inst);
  for (const auto& o : outs) {
    const std::string name = "path_" + o.method + ".csv";
    write_path_csv((fs::path(spec.out) / name).string(), o.path);
    manifest.add_file(spec.out, name);
    std::cout << "[solve] " << spec.problem << " eps=" << format_double(spec.eps) << " "
              << o.method << ": oracle_k=" << o.best_k << " err=" << format_double(o.best_err)
              << " lcurve_k=" << o.lcurve_k << " err=" << format_double(o.lcurve_err) << '\n';
  }
  manifest.write(spec.out);
  return kExitOk;
}

int run_diagnose(const RunSpec& spec) {
  validate_spec(spec);
  Manifest manifest(spec);
  NoisyInstance inst = load_or_generate(spec, &manifest);
  const int code = diagnose_into(spec, inst, &manifest, std::cout);
  manifest.write(spec.out);
  return code;
}

int run_sweep(const std::string& specs_file, const std::string& out_dir, int workers) {
  std::ifstream is(specs_file);
  if (!is) throw UsageError("cannot open sweep file '" + specs_file + "'");
  std::vector<RunSpec> specs;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (!line.empty()) specs.push_back(parse_spec_file(line));
  }
  if (specs.empty()) throw UsageError("sweep file lists no runs");

  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(specs.size())));

  std::vector<std::vector<SummaryRow>> results(specs.size());
  std::vector<std::string> errors(specs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      std::ostringstream log;
      try {
        results[i] = run_one_for_sweep(specs[i], log);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cout << log.str();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool failed = false;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "[sweep] run " << i + 1 << " (" << specs[i].problem
                << " eps=" << format_double(specs[i].eps) << ") failed: " << errors[i] << '\n';
      failed = true;
    }
  }

  std::vector<SummaryRow> merged;
  for (const auto& rows : results) {
    merged.insert(merged.end(), rows.begin(), rows.end());
  }
  fs::create_directories(out_dir);
  write_summary_csv((fs::path(out_dir) / "summary.csv").string(), merged);
  std::cout << "[sweep] " << specs.size() << " runs, summary -> "
            << (fs::path(out_dir) / "summary.csv").string() << '\n';
  return failed ? kExitNumerical : kExitOk;
}

int run_report(const std::string& out_dir) {
  bool printed = false;
  const fs::path manifest = fs::path(out_dir) / "manifest.txt";
  if (fs::exists(manifest)) {
    std::ifstream is(manifest.string());
    std::cout << is.rdbuf();
    printed = true;
  }
  const fs::path summary = fs::path(out_dir) / "summary.csv";
  if (fs::exists(summary)) {
    std::ifstream is(summary.string());
    std::string line;
    while (std::getline(is, line)) {
      for (auto& ch : line) {
        if (ch == ',') ch = '\t';
      }
      std::cout << line << '\n';
    }
    printed = true;
  }
  if (!printed) throw UsageError("no manifest.txt or summary.csv under '" + out_dir + "'");
  return kExitOk;
}

}  // namespace illposed
