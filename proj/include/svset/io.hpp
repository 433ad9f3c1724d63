#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svset/solver.hpp"

namespace svset {

/// Matrix Market reader (array and coordinate, real/integer/complex, general
/// plus symmetric/hermitian/skew-symmetric storage). Parse errors carry
/// line/column information.
Matrix load_matrix_market(const std::filesystem::path& path);

/// Writer; emits complex format when the matrix has any nonzero imaginary
/// part, array format throughout. Values print with enough digits to
/// round-trip binary-exactly.
void save_matrix_market(const std::filesystem::path& path, const Matrix& M,
                        const std::string& comment = "");

/// A system bundle: manifest naming the five matrix files (B, C, D, E
/// optional; missing B, C, E default to identity and D to zero) plus optional
/// eps and mode defaults.
struct SystemBundle {
  std::filesystem::path a_path;
  std::optional<std::filesystem::path> b_path, c_path, d_path, e_path;
  std::optional<double> eps;
  std::optional<Mode> mode;
};

/// Parses a manifest file, or a directory containing manifest.txt, or a
/// directory with conventional A.mtx/B.mtx/C.mtx/D.mtx/E.mtx names.
SystemBundle load_bundle(const std::filesystem::path& path);

/// Loads the matrices of a bundle, applies the pseudospectral defaults, and
/// validates dimensions (mismatches name both offending matrices).
StateSpaceSystem load_system(const std::filesystem::path& path);

/// Serialized solve report plus environment metadata.
struct ReportDocument {
  SolveReport report;
  std::string backend;
  double wall_time_sec = 0.0;
};

std::string report_to_json(const ReportDocument& doc);
ReportDocument report_from_json(const std::string& text);

struct ContourWindow {
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
};

/// CSV of (x, y, ||G||) over an nx-by-ny grid; the header records eps^{-1} as
/// the level of interest. Poles print as +inf; evaluation failures as nan.
void emit_contour(std::ostream& os, const SvsProblem& problem,
                  const ContourWindow& window, int nx, int ny);

/// Benchmark harness: runs improved and directly-extended on every system
/// bundle under dir and prints the counter table with "% faster" columns.
int run_bench(const std::filesystem::path& dir, double eps_default, Mode mode,
              const SolverOptions& base_options, std::ostream& os);

/// Full command-line interface (abscissa, radius, contour, bench). Returns
/// the process exit code; machine-readable error classes go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace svset
