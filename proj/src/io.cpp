#include "illposed/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace illposed {

namespace {

constexpr char kMagic[4] = {'I', 'L', 'P', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindInstance = 1;
constexpr std::uint32_t kKindFactorization = 2;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void put_matrix(std::ostream& os, const Matrix& A) {
  put_u64(os, static_cast<std::uint64_t>(A.rows()));
  put_u64(os, static_cast<std::uint64_t>(A.cols()));
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      put_f64(os, A(i, j));
    }
  }
}

Matrix get_matrix(std::istream& is) {
  const auto rows = static_cast<Index>(get_u64(is));
  const auto cols = static_cast<Index>(get_u64(is));
  Matrix A(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      A(i, j) = get_f64(is);
    }
  }
  return A;
}

void put_vector(std::ostream& os, const Vector& v) {
  put_u64(os, static_cast<std::uint64_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) put_f64(os, v(i));
}

Vector get_vector(std::istream& is) {
  const auto n = static_cast<Index>(get_u64(is));
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = get_f64(is);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("io: cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("io: cannot open '" + path + "' for reading");
  return is;
}

void read_header(std::istream& is, std::uint32_t expected_kind, const std::string& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("io: '" + path + "' is not a container file");
  }
  if (get_u32(is) != kVersion) throw std::runtime_error("io: unsupported container version");
  if (get_u32(is) != expected_kind) throw std::runtime_error("io: unexpected container kind");
}

}  // namespace

void write_instance(const std::string& path, const NoisyInstance& inst) {
  std::ofstream os = open_out(path);
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, kKindInstance);
  put_u32(os, static_cast<std::uint32_t>(inst.problem.name.size()));
  os.write(inst.problem.name.data(), static_cast<std::streamsize>(inst.problem.name.size()));
  put_u64(os, static_cast<std::uint64_t>(inst.problem.A.rows()));
  put_u64(os, inst.seed);
  put_f64(os, inst.epsilon);
  put_matrix(os, inst.problem.A);
  put_vector(os, inst.problem.x_true);
  put_vector(os, inst.problem.b_hat);
  put_vector(os, inst.e);
  if (!os) throw std::runtime_error("io: short write to '" + path + "'");
}

NoisyInstance read_instance(const std::string& path) {
  std::ifstream is = open_in(path);
  read_header(is, kKindInstance, path);
  const auto name_len = get_u32(is);
  std::string name(name_len, '\0');
  is.read(name.data(), name_len);
  const auto n = static_cast<Index>(get_u64(is));
  const std::uint64_t seed = get_u64(is);
  const double epsilon = get_f64(is);
  Matrix A = get_matrix(is);
  Vector x = get_vector(is);
  Vector bh = get_vector(is);
  Vector e = get_vector(is);
  if (!is) throw std::runtime_error("io: short read from '" + path + "'");
  if (A.rows() != n || A.cols() != n || x.size() != n || bh.size() != n || e.size() != n) {
    throw std::runtime_error("io: inconsistent dimensions in '" + path + "'");
  }
  return NoisyInstance{DiscreteProblem{std::move(name), std::move(A), std::move(x), std::move(bh)},
                       std::move(e), epsilon, seed};
}

void write_factorization(const std::string& path, const Bidiagonalization& f) {
  std::ofstream os = open_out(path);
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, kKindFactorization);
  const int k = f.k();
  put_matrix(os, f.P(k + 1));
  put_matrix(os, f.Q(k));
  put_u64(os, static_cast<std::uint64_t>(k + 1));
  for (int j = 1; j <= k + 1; ++j) put_f64(os, f.alpha(j));
  put_u64(os, static_cast<std::uint64_t>(k));
  for (int j = 2; j <= k + 1; ++j) put_f64(os, f.beta(j));
  if (!os) throw std::runtime_error("io: short write to '" + path + "'");
}

FactorizationDump read_factorization(const std::string& path) {
  std::ifstream is = open_in(path);
  read_header(is, kKindFactorization, path);
  FactorizationDump d;
  d.P = get_matrix(is);
  d.Q = get_matrix(is);
  const auto na = get_u64(is);
  d.alpha.resize(na);
  for (auto& v : d.alpha) v = get_f64(is);
  const auto nb = get_u64(is);
  d.beta.resize(nb);
  for (auto& v : d.beta) v = get_f64(is);
  if (!is) throw std::runtime_error("io: short read from '" + path + "'");
  return d;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_path_csv(std::ostream& os, const SolverPath& path) {
  os << "k,residual_norm,solution_norm,relative_error,inner_rank\n";
  for (int i = 0; i < path.kmax(); ++i) {
    const double rel = path.relative_errors
                           ? (*path.relative_errors)[static_cast<std::size_t>(i)]
                           : std::numeric_limits<double>::quiet_NaN();
    const int rank =
        path.inner_truncation.empty() ? 0 : path.inner_truncation[static_cast<std::size_t>(i)];
    os << (i + 1) << ',' << format_double(path.residual_norms[static_cast<std::size_t>(i)]) << ','
       << format_double(path.solution_norms[static_cast<std::size_t>(i)]) << ','
       << format_double(rel) << ',' << rank << '\n';
  }
}

void write_path_csv(const std::string& path, const SolverPath& p) {
  std::ofstream os = open_out(path);
  write_path_csv(os, p);
}

SolverPath read_path_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("io: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line) || line.rfind("k,residual_norm", 0) != 0) {
    throw std::runtime_error("io: '" + path + "' is not a path CSV");
  }
  SolverPath p;
  std::vector<double> rel;
  bool any_rel = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    double vals[4];
    std::getline(ss, field, ',');  // k
    for (double& val : vals) {
      if (!std::getline(ss, field, ',')) {
        throw std::runtime_error("io: malformed row in '" + path + "'");
      }
      val = std::strtod(field.c_str(), nullptr);
    }
    p.residual_norms.push_back(vals[0]);
    p.solution_norms.push_back(vals[1]);
    rel.push_back(vals[2]);
    if (std::isfinite(vals[2])) any_rel = true;
    p.inner_truncation.push_back(static_cast<int>(vals[3]));
    p.iterates.emplace_back();
  }
  if (any_rel) p.relative_errors = std::move(rel);
  return p;
}

void write_diagnostics_csv(std::ostream& os, const DiagnosticsTable& table) {
  os << "k,gamma,alpha_next,sigma_next,sin_theta,c_k,bound_eqres1,bound_thm22_hi,"
        "ritz_residual,roundoff_flag\n";
  for (const auto& r : table.rows) {
    os << r.k << ',' << format_double(r.gamma) << ',' << format_double(r.alpha_next) << ','
       << format_double(r.sigma_next) << ',' << format_double(r.sin_theta) << ','
       << format_double(r.c_k) << ',' << format_double(r.bound_eqres1) << ','
       << format_double(r.bound_thm22_hi) << ',' << format_double(r.ritz_residual) << ','
       << (r.roundoff_flag ? 1 : 0) << '\n';
  }
}

void write_diagnostics_csv(const std::string& path, const DiagnosticsTable& table) {
  std::ofstream os = open_out(path);
  write_diagnostics_csv(os, table);
}

void write_instance_csv(const std::string& path, const NoisyInstance& inst) {
  std::ofstream os = open_out(path);
  os << "i,x_true,b_hat,e,b\n";
  const Vector b = inst.b();
  for (Index i = 0; i < b.size(); ++i) {
    os << (i + 1) << ',' << format_double(inst.problem.x_true(i)) << ','
       << format_double(inst.problem.b_hat(i)) << ',' << format_double(inst.e(i)) << ','
       << format_double(b(i)) << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Matrix& A) {
  std::ofstream os = open_out(path);
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      os << format_double(A(i, j)) << (j + 1 == A.cols() ? '\n' : ',');
    }
  }
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream is = open_in(path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 14];
  while (is) {
    is.read(buf, sizeof buf);
    const std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace illposed
