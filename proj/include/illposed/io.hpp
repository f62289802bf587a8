#pragma once

#include "illposed/bidiag.hpp"
#include "illposed/diagnostics.hpp"
#include "illposed/problems.hpp"
#include "illposed/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace illposed {

// Flat binary container, little-endian 64-bit floats. An instance file holds
// the header (name, n, seed, epsilon) followed by row-major A, x_true,
// b_hat, e. A factorization dump holds P, Q, alpha, beta.

void write_instance(const std::string& path, const NoisyInstance& inst);
NoisyInstance read_instance(const std::string& path);

struct FactorizationDump {
  Matrix P;
  Matrix Q;
  std::vector<double> alpha;
  std::vector<double> beta;
};

void write_factorization(const std::string& path, const Bidiagonalization& f);
FactorizationDump read_factorization(const std::string& path);

/// Deterministic decimal form used by every CSV writer (17 significant
/// digits, round-trip exact).
std::string format_double(double v);

void write_path_csv(std::ostream& os, const SolverPath& path);
void write_path_csv(const std::string& path, const SolverPath& p);

/// Scalar columns of a path CSV (iterates are not stored in CSV form).
SolverPath read_path_csv(const std::string& path);

void write_diagnostics_csv(std::ostream& os, const DiagnosticsTable& table);
void write_diagnostics_csv(const std::string& path, const DiagnosticsTable& table);

/// Per-instance CSV dump for inspection: x_true, b_hat, e, b columns.
void write_instance_csv(const std::string& path, const NoisyInstance& inst);
void write_matrix_csv(const std::string& path, const Matrix& A);

/// FNV-1a 64-bit digest of a file's bytes.
std::uint64_t fnv1a64_file(const std::string& path);
std::string digest_hex(std::uint64_t digest);

}  // namespace illposed
