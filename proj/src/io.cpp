#include "svset/io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace svset {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const fs::path& path, int line, int col,
                             const std::string& msg) {
  throw SvsError(ErrorClass::ParseError, path.string() + ":" + std::to_string(line) +
                                             ":" + std::to_string(col) + ": " + msg);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct LineTokens {
  std::vector<std::string> tokens;
  std::vector<int> cols;  // 1-based column of each token
};

LineTokens tokenize(const std::string& line) {
  LineTokens out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.tokens.push_back(line.substr(i, j - i));
    out.cols.push_back(static_cast<int>(i) + 1);
    i = j;
  }
  return out;
}

double parse_number(const fs::path& path, int line, int col, const std::string& tok) {
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) parse_fail(path, line, col, "malformed number '" + tok + "'");
    return v;
  } catch (const std::exception&) {
    parse_fail(path, line, col, "malformed number '" + tok + "'");
  }
}

long parse_index(const fs::path& path, int line, int col, const std::string& tok) {
  try {
    size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size() || v < 0)
      parse_fail(path, line, col, "malformed index '" + tok + "'");
    return v;
  } catch (const std::exception&) {
    parse_fail(path, line, col, "malformed index '" + tok + "'");
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Matrix load_matrix_market(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SvsError(ErrorClass::IoError, "cannot open '" + path.string() + "'");

  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, 1, "empty file");
  ++lineno;
  LineTokens head = tokenize(line);
  if (head.tokens.size() < 4 || lower(head.tokens[0]) != "%%matrixmarket" ||
      lower(head.tokens[1]) != "matrix")
    parse_fail(path, 1, 1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  const std::string format = lower(head.tokens[2]);
  const std::string field = head.tokens.size() > 3 ? lower(head.tokens[3]) : "real";
  const std::string symmetry = head.tokens.size() > 4 ? lower(head.tokens[4]) : "general";
  if (format != "array" && format != "coordinate")
    parse_fail(path, 1, head.cols[2], "unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "complex")
    parse_fail(path, 1, head.cols[3], "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian" &&
      symmetry != "skew-symmetric")
    parse_fail(path, 1, head.cols.size() > 4 ? head.cols[4] : 1,
               "unsupported symmetry '" + symmetry + "'");
  const bool complex_field = field == "complex";

  // Size line (first non-comment, non-blank line).
  LineTokens size_toks;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    size_toks = tokenize(line);
    if (!size_toks.tokens.empty()) break;
  }
  if (size_toks.tokens.empty()) parse_fail(path, lineno, 1, "missing size line");
  const size_t expect_size_tokens = format == "coordinate" ? 3 : 2;
  if (size_toks.tokens.size() != expect_size_tokens)
    parse_fail(path, lineno, size_toks.cols[0],
               format == "coordinate" ? "expected 'rows cols nnz'" : "expected 'rows cols'");
  const long rows = parse_index(path, lineno, size_toks.cols[0], size_toks.tokens[0]);
  const long cols = parse_index(path, lineno, size_toks.cols[1], size_toks.tokens[1]);
  if (rows < 1 || cols < 1) parse_fail(path, lineno, size_toks.cols[0], "invalid dimensions");
  Matrix M = Matrix::Zero(rows, cols);

  auto apply_symmetry = [&](long i, long j, Complex v) {
    M(i, j) = v;
    if (i == j || symmetry == "general") return;
    if (symmetry == "symmetric") M(j, i) = v;
    else if (symmetry == "hermitian") M(j, i) = std::conj(v);
    else M(j, i) = -v;  // skew-symmetric
  };

  if (format == "coordinate") {
    const long nnz = parse_index(path, lineno, size_toks.cols[2], size_toks.tokens[2]);
    long seen = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line[0] == '%') continue;
      LineTokens t = tokenize(line);
      if (t.tokens.empty()) continue;
      const size_t need = complex_field ? 4 : 3;
      if (t.tokens.size() != need)
        parse_fail(path, lineno, t.cols[0],
                   "expected 'i j " + std::string(complex_field ? "re im" : "value") + "'");
      const long i = parse_index(path, lineno, t.cols[0], t.tokens[0]);
      const long j = parse_index(path, lineno, t.cols[1], t.tokens[1]);
      if (i < 1 || i > rows || j < 1 || j > cols)
        parse_fail(path, lineno, t.cols[0], "index out of range");
      const double re = parse_number(path, lineno, t.cols[2], t.tokens[2]);
      const double im = complex_field ? parse_number(path, lineno, t.cols[3], t.tokens[3]) : 0.0;
      apply_symmetry(i - 1, j - 1, Complex(re, im));
      ++seen;
    }
    if (seen != nnz)
      parse_fail(path, lineno, 1,
                 "entry count " + std::to_string(seen) + " does not match header nnz " +
                     std::to_string(nnz));
    return M;
  }

  // Array format: column-major dense; symmetric variants list the lower
  // triangle only (skew-symmetric excludes the diagonal).
  std::vector<std::pair<long, long>> slots;
  for (long j = 0; j < cols; ++j) {
    long i0 = symmetry == "general" ? 0 : (symmetry == "skew-symmetric" ? j + 1 : j);
    for (long i = i0; i < rows; ++i) slots.emplace_back(i, j);
  }
  size_t slot = 0;
  std::vector<double> pending;
  const size_t per_entry = complex_field ? 2 : 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    LineTokens t = tokenize(line);
    for (size_t k = 0; k < t.tokens.size(); ++k) {
      if (slot >= slots.size())
        parse_fail(path, lineno, t.cols[k], "more entries than the header declares");
      pending.push_back(parse_number(path, lineno, t.cols[k], t.tokens[k]));
      if (pending.size() == per_entry) {
        Complex v(pending[0], complex_field ? pending[1] : 0.0);
        apply_symmetry(slots[slot].first, slots[slot].second, v);
        ++slot;
        pending.clear();
      }
    }
  }
  if (slot != slots.size() || !pending.empty())
    parse_fail(path, lineno, 1, "fewer entries than the header declares");
  return M;
}

void save_matrix_market(const fs::path& path, const Matrix& M, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw SvsError(ErrorClass::IoError, "cannot write '" + path.string() + "'");
  const bool complex_field = !(M.imag().array() == 0.0).all();
  out << "%%MatrixMarket matrix array " << (complex_field ? "complex" : "real")
      << " general\n";
  if (!comment.empty()) out << "% " << comment << "\n";
  out << M.rows() << " " << M.cols() << "\n";
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      out << format_double(M(i, j).real());
      if (complex_field) out << " " << format_double(M(i, j).imag());
      out << "\n";
    }
}

SystemBundle load_bundle(const fs::path& path) {
  fs::path manifest;
  fs::path base;
  if (fs::is_directory(path)) {
    base = path;
    if (fs::exists(path / "manifest.txt")) {
      manifest = path / "manifest.txt";
    } else if (fs::exists(path / "A.mtx")) {
      SystemBundle b;
      b.a_path = path / "A.mtx";
      for (auto [name, slot] : {std::pair{"B.mtx", &b.b_path}, {"C.mtx", &b.c_path},
                                {"D.mtx", &b.d_path}, {"E.mtx", &b.e_path}})
        if (fs::exists(path / name)) *slot = path / name;
      return b;
    } else {
      throw SvsError(ErrorClass::IoError,
                     "'" + path.string() + "' has neither manifest.txt nor A.mtx");
    }
  } else if (fs::exists(path)) {
    manifest = path;
    base = path.parent_path();
  } else {
    throw SvsError(ErrorClass::IoError, "system path '" + path.string() + "' not found");
  }

  std::ifstream in(manifest);
  if (!in) throw SvsError(ErrorClass::IoError, "cannot open '" + manifest.string() + "'");
  SystemBundle b;
  bool have_a = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    LineTokens t = tokenize(line);
    if (t.tokens.empty()) continue;
    std::string key = lower(t.tokens[0]);
    size_t vi = 1;
    if (vi < t.tokens.size() && t.tokens[vi] == "=") ++vi;
    if (vi >= t.tokens.size())
      parse_fail(manifest, lineno, t.cols[0], "missing value for '" + t.tokens[0] + "'");
    const std::string val = t.tokens[vi];
    if (key == "a") { b.a_path = base / val; have_a = true; }
    else if (key == "b") b.b_path = base / val;
    else if (key == "c") b.c_path = base / val;
    else if (key == "d") b.d_path = base / val;
    else if (key == "e") b.e_path = base / val;
    else if (key == "eps" || key == "epsilon")
      b.eps = parse_number(manifest, lineno, t.cols[static_cast<int>(vi)], val);
    else if (key == "mode") {
      const std::string m = lower(val);
      if (m == "abscissa") b.mode = Mode::Abscissa;
      else if (m == "radius") b.mode = Mode::Radius;
      else parse_fail(manifest, lineno, t.cols[static_cast<int>(vi)],
                      "mode must be 'abscissa' or 'radius'");
    } else {
      parse_fail(manifest, lineno, t.cols[0], "unknown manifest key '" + t.tokens[0] + "'");
    }
  }
  if (!have_a) throw SvsError(ErrorClass::ParseError,
                              manifest.string() + ": manifest does not name an A matrix");
  return b;
}

namespace {

void check_dims(const char* name, const Matrix& M, Eigen::Index rows,
                Eigen::Index cols, const char* against) {
  if (M.rows() != rows || M.cols() != cols)
    throw SvsError(ErrorClass::DimensionMismatch,
                   std::string(name) + " is " + std::to_string(M.rows()) + " x " +
                       std::to_string(M.cols()) + " but " + against + " requires " +
                       std::to_string(rows) + " x " + std::to_string(cols));
}

}  // namespace

StateSpaceSystem load_system(const fs::path& path) {
  SystemBundle b = load_bundle(path);
  StateSpaceSystem s;
  s.A = load_matrix_market(b.a_path);
  const Eigen::Index n = s.A.rows();
  if (s.A.cols() != n)
    throw SvsError(ErrorClass::DimensionMismatch,
                   "A must be square, got " + std::to_string(n) + " x " +
                       std::to_string(s.A.cols()));
  s.B = b.b_path ? load_matrix_market(*b.b_path) : Matrix::Identity(n, n);
  s.C = b.c_path ? load_matrix_market(*b.c_path) : Matrix::Identity(n, n);
  s.E = b.e_path ? load_matrix_market(*b.e_path) : Matrix::Identity(n, n);
  if (s.B.rows() != n)
    throw SvsError(ErrorClass::DimensionMismatch,
                   "B has " + std::to_string(s.B.rows()) + " rows but A is " +
                       std::to_string(n) + " x " + std::to_string(n));
  if (s.C.cols() != n)
    throw SvsError(ErrorClass::DimensionMismatch,
                   "C has " + std::to_string(s.C.cols()) + " columns but A is " +
                       std::to_string(n) + " x " + std::to_string(n));
  check_dims("E", s.E, n, n, "A");
  s.D = b.d_path ? load_matrix_market(*b.d_path) : Matrix::Zero(s.C.rows(), s.B.cols());
  check_dims("D", s.D, s.C.rows(), s.B.cols(), "B and C");
  return s;
}

namespace {

json num_or_inf(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

double json_num(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw SvsError(ErrorClass::ParseError, "bad numeric token '" + s + "'");
  }
  return j.get<double>();
}

const char* mode_name(Mode m) { return m == Mode::Abscissa ? "abscissa" : "radius"; }
const char* method_name(Method m) {
  return m == Method::Improved ? "improved" : "direct-extended";
}

}  // namespace

std::string report_to_json(const ReportDocument& doc) {
  const SolveReport& r = doc.report;
  json j;
  j["mode"] = mode_name(r.mode);
  j["method"] = method_name(r.method);
  j["epsilon"] = r.epsilon;
  j["seed"] = r.seed;
  j["eta"] = num_or_inf(r.eta);
  j["eta_infinite"] = r.eta_infinite;
  j["converged"] = r.converged;
  json its = json::array();
  for (double v : r.iterates) its.push_back(num_or_inf(v));
  j["iterates"] = its;
  j["counters"] = {{"eig_solves", r.eig_solves},
                   {"svd_evals", r.svd_evals},
                   {"level_searches", r.level_searches},
                   {"line_searches", r.line_searches},
                   {"root_searches_solved", r.root_searches_solved},
                   {"root_searches_requested", r.root_searches_requested}};
  j["escape_events"] = r.escape_events;
  j["iterations"] = r.iterations;
  j["diagnostics"] = r.diagnostics;
  if (r.final_point_valid)
    j["final_point"] = {{"re", r.final_point.real()}, {"im", r.final_point.imag()}};
  else
    j["final_point"] = nullptr;
  j["initial_perturbation"] = r.initial_perturbation;
  j["tolerances"] = {{"imag_eig", r.tol.imag_eig},
                     {"dedup", r.tol.dedup},
                     {"root_f", r.tol.root_f},
                     {"root_bracket", r.tol.root_bracket},
                     {"simplicity", r.tol.simplicity},
                     {"split_rel", r.tol.split_rel},
                     {"membership_band", r.tol.membership_band},
                     {"ctrb_obsv", r.tol.ctrb_obsv},
                     {"boundary_band", r.tol.boundary_band}};
  j["backend"] = doc.backend;
  j["wall_time_sec"] = doc.wall_time_sec;
  return j.dump(2) + "\n";
}

ReportDocument report_from_json(const std::string& text) {
  json j = json::parse(text);
  ReportDocument doc;
  SolveReport& r = doc.report;
  r.mode = j.at("mode").get<std::string>() == "abscissa" ? Mode::Abscissa : Mode::Radius;
  r.method = j.at("method").get<std::string>() == "improved" ? Method::Improved
                                                             : Method::DirectExtended;
  r.epsilon = j.at("epsilon").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.eta = json_num(j.at("eta"));
  r.eta_infinite = j.at("eta_infinite").get<bool>();
  r.converged = j.at("converged").get<bool>();
  for (const json& v : j.at("iterates")) r.iterates.push_back(json_num(v));
  const json& c = j.at("counters");
  r.eig_solves = c.at("eig_solves").get<long>();
  r.svd_evals = c.at("svd_evals").get<long>();
  r.level_searches = c.at("level_searches").get<long>();
  r.line_searches = c.at("line_searches").get<long>();
  r.root_searches_solved = c.at("root_searches_solved").get<long>();
  r.root_searches_requested = c.at("root_searches_requested").get<long>();
  r.escape_events = j.at("escape_events").get<int>();
  r.iterations = j.at("iterations").get<int>();
  for (const json& d : j.at("diagnostics")) r.diagnostics.push_back(d.get<std::string>());
  if (!j.at("final_point").is_null()) {
    r.final_point_valid = true;
    r.final_point = Complex(j["final_point"].at("re").get<double>(),
                            j["final_point"].at("im").get<double>());
  }
  r.initial_perturbation = j.at("initial_perturbation").get<double>();
  const json& t = j.at("tolerances");
  r.tol.imag_eig = t.at("imag_eig").get<double>();
  r.tol.dedup = t.at("dedup").get<double>();
  r.tol.root_f = t.at("root_f").get<double>();
  r.tol.root_bracket = t.at("root_bracket").get<double>();
  r.tol.simplicity = t.at("simplicity").get<double>();
  r.tol.split_rel = t.at("split_rel").get<double>();
  r.tol.membership_band = t.at("membership_band").get<double>();
  r.tol.ctrb_obsv = t.at("ctrb_obsv").get<double>();
  r.tol.boundary_band = t.at("boundary_band").get<double>();
  doc.backend = j.at("backend").get<std::string>();
  doc.wall_time_sec = j.at("wall_time_sec").get<double>();
  return doc;
}

void emit_contour(std::ostream& os, const SvsProblem& problem,
                  const ContourWindow& w, int nx, int ny) {
  if (nx < 2 || ny < 2)
    throw SvsError(ErrorClass::BadArguments, "contour grid must be at least 2 x 2");
  TransferEvaluator ev(problem.system, problem.options,
                       static_cast<long>(nx) * static_cast<long>(ny));
  os << "# eps," << format_double(problem.epsilon) << "\n";
  os << "# level," << format_double(problem.gamma()) << "\n";
  os << "x,y,norm\n";
  long nan_count = 0;
  for (int iy = 0; iy < ny; ++iy) {
    const double y = w.y0 + (w.y1 - w.y0) * iy / (ny - 1);
    for (int ix = 0; ix < nx; ++ix) {
      const double x = w.x0 + (w.x1 - w.x0) * ix / (nx - 1);
      const double v = ev.norm_value(Complex(x, y));
      os << format_double(x) << "," << format_double(y) << ",";
      if (std::isnan(v)) {
        os << "nan";
        ++nan_count;
      } else if (std::isinf(v)) {
        os << "+inf";
      } else {
        os << format_double(v);
      }
      os << "\n";
    }
  }
  os << "# nan_count," << nan_count << "\n";
}

namespace {

double pct_faster(double t_de, double t_new) {
  if (t_de <= 0.0 || t_new <= 0.0) return 0.0;
  return t_de >= t_new ? 100.0 * (t_de / t_new - 1.0) : -100.0 * (t_new / t_de - 1.0);
}

struct BenchRow {
  std::string name;
  Eigen::Index n, m, p;
  SolveReport de, im;
  double t_de, t_im;
};

}  // namespace

int run_bench(const fs::path& dir, double eps_default, Mode mode,
              const SolverOptions& base_options, std::ostream& os) {
  if (!fs::is_directory(dir))
    throw SvsError(ErrorClass::IoError, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() ||
        (e.is_regular_file() && e.path().extension() == ".manifest"))
      entries.push_back(e.path());
  }
  std::sort(entries.begin(), entries.end());
  if (entries.empty())
    throw SvsError(ErrorClass::IoError, "no system bundles under '" + dir.string() + "'");

  std::vector<BenchRow> rows;
  for (const fs::path& e : entries) {
    SystemBundle b = load_bundle(e);
    SvsProblem pb;
    pb.system = load_system(e);
    pb.epsilon = b.eps.value_or(eps_default);
    pb.mode = b.mode.value_or(mode);
    pb.options = base_options;
    validate(pb);

    BenchRow row;
    row.name = e.filename().string();
    row.n = pb.system.n();
    row.m = pb.system.m();
    row.p = pb.system.p();

    using clock = std::chrono::steady_clock;
    pb.options.method = Method::DirectExtended;
    auto t0 = clock::now();
    row.de = svs_direct_extended(pb);
    row.t_de = std::chrono::duration<double>(clock::now() - t0).count();

    pb.options.method = Method::Improved;
    t0 = clock::now();
    row.im = pb.mode == Mode::Abscissa ? svs_abscissa(pb) : svs_radius(pb);
    row.t_im = std::chrono::duration<double>(clock::now() - t0).count();
    rows.push_back(std::move(row));
  }

  const char* level_hdr = mode == Mode::Abscissa ? "vert." : "circ.";
  const char* prog_hdr = mode == Mode::Abscissa ? "horz." : "rad.";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %4s %3s %3s | %5s %5s | %6s %6s | %5s %5s | %7s %9s | %9s %9s | %8s\n",
                "Problem", "n", "m", "p", "EigDE", "Eig", "SVDDE", "SVD", level_hdr,
                level_hdr, prog_hdr, prog_hdr, "timeDE", "time", "% faster");
  os << buf;
  double pct_sum = 0.0;
  for (const BenchRow& r : rows) {
    std::string de_prog = std::to_string(r.de.root_searches_solved);
    std::string im_prog = std::to_string(r.im.root_searches_solved) + "(" +
                          std::to_string(r.im.root_searches_requested) + ")";
    const double pct = pct_faster(r.t_de, r.t_im);
    pct_sum += pct;
    std::snprintf(buf, sizeof buf,
                  "%-20s %4ld %3ld %3ld | %5ld %5ld | %6ld %6ld | %5ld %5ld | %7s %9s | %9.3f %9.3f | %8.0f\n",
                  r.name.c_str(), static_cast<long>(r.n), static_cast<long>(r.m),
                  static_cast<long>(r.p), r.de.eig_solves, r.im.eig_solves,
                  r.de.svd_evals, r.im.svd_evals, r.de.level_searches,
                  r.im.level_searches, de_prog.c_str(), im_prog.c_str(), r.t_de, r.t_im,
                  pct);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "Average %% faster: %.0f\n",
                pct_sum / static_cast<double>(rows.size()));
  os << buf;
  return 0;
}

namespace {

struct CliCommon {
  std::string system_path;
  double eps = -1.0;
  std::string method = "improved";
  std::uint64_t seed = 100;
  int random_angles = 3;
  std::string include = "all";
  std::string report_path;
  bool horizontal_first = false;
  int max_iter = 100;
  std::string eval_path = "auto";
  std::string resolvent = "auto";
  double tol_eig = -1.0, tol_root = -1.0, tol_simplicity = -1.0, tol_dedup = -1.0,
         tol_split = -1.0;
  bool no_warm_start = false;
};

void add_common(CLI::App* cmd, CliCommon& c) {
  cmd->add_option("--system", c.system_path, "system bundle (manifest file or directory)")
      ->required();
  cmd->add_option("--eps", c.eps, "perturbation level epsilon");
  cmd->add_option("--method", c.method, "improved|direct")
      ->check(CLI::IsMember({"improved", "direct"}));
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--random-angles", c.random_angles, "escape directions per round");
  cmd->add_option("--include", c.include, "eigenvalue inclusion criteria")
      ->check(CLI::IsMember({"all", "ctrb-obsv"}));
  cmd->add_option("--report", c.report_path, "write a JSON report document here");
  cmd->add_flag("--horizontal-first", c.horizontal_first,
                "direct-extended: start with a horizontal search");
  cmd->add_option("--max-iter", c.max_iter, "iteration cap");
  cmd->add_option("--eval-path", c.eval_path, "auto|shortcut|full")
      ->check(CLI::IsMember({"auto", "shortcut", "full"}));
  cmd->add_option("--resolvent", c.resolvent, "auto|lu|hessenberg")
      ->check(CLI::IsMember({"auto", "lu", "hessenberg"}));
  cmd->add_option("--tol-eig", c.tol_eig, "imaginary/unimodular eigenvalue tolerance");
  cmd->add_option("--tol-root", c.tol_root, "root residual tolerance (relative)");
  cmd->add_option("--tol-simplicity", c.tol_simplicity, "singular value simplicity gap");
  cmd->add_option("--tol-dedup", c.tol_dedup, "boundary ordinate merge tolerance");
  cmd->add_option("--tol-split", c.tol_split, "split safeguard closeness fraction");
  cmd->add_flag("--no-warm-start", c.no_warm_start, "disable the real-axis warm start");
}

SvsProblem problem_from_cli(const CliCommon& c, Mode mode) {
  SystemBundle bundle = load_bundle(c.system_path);
  SvsProblem pb;
  pb.system = load_system(c.system_path);
  pb.mode = mode;
  if (c.eps > 0.0) pb.epsilon = c.eps;
  else if (bundle.eps) pb.epsilon = *bundle.eps;
  else throw SvsError(ErrorClass::BadArguments, "no --eps given and the manifest has none");
  pb.inclusion = c.include == "all" ? Inclusion::All : Inclusion::ControllableAndObservable;
  SolverOptions& o = pb.options;
  o.method = c.method == "improved" ? Method::Improved : Method::DirectExtended;
  o.rng_seed = c.seed;
  o.random_angles = c.random_angles;
  o.start_with_level_search = !c.horizontal_first;
  o.max_iterations = c.max_iter;
  o.real_axis_warm_start = !c.no_warm_start;
  if (c.eval_path == "shortcut") o.eval_path = EvalPath::SigmaMinShortcut;
  else if (c.eval_path == "full") o.eval_path = EvalPath::FullTransfer;
  if (c.resolvent == "lu") o.resolvent = ResolventMode::LuPerPoint;
  else if (c.resolvent == "hessenberg") o.resolvent = ResolventMode::HessenbergPrecomputed;
  if (c.tol_eig > 0) o.tol.imag_eig = c.tol_eig;
  if (c.tol_root > 0) o.tol.root_f = c.tol_root;
  if (c.tol_simplicity > 0) o.tol.simplicity = c.tol_simplicity;
  if (c.tol_dedup > 0) o.tol.dedup = c.tol_dedup;
  if (c.tol_split > 0) o.tol.split_rel = c.tol_split;
  return pb;
}

int run_solve(const CliCommon& c, Mode mode, std::ostream& out) {
  SvsProblem pb = problem_from_cli(c, mode);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  SolveReport rep = svs_solve(pb);
  const double wall = std::chrono::duration<double>(clock::now() - t0).count();
  if (rep.eta_infinite) out << "inf\n";
  else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", rep.eta);
    out << buf << "\n";
  }
  if (!c.report_path.empty()) {
    ReportDocument doc{rep, "eigen+lapack", wall};
    std::ofstream f(c.report_path);
    if (!f) throw SvsError(ErrorClass::IoError, "cannot write '" + c.report_path + "'");
    f << report_to_json(doc);
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (const char* threads = std::getenv("SVSET_NUM_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  CLI::App app{"spectral value set abscissa and radius computations"};
  app.require_subcommand(1);

  CliCommon ca, cr;
  CLI::App* abscissa = app.add_subcommand("abscissa", "compute the eps-spectral value set abscissa");
  add_common(abscissa, ca);
  CLI::App* radius = app.add_subcommand("radius", "compute the eps-spectral value set radius");
  add_common(radius, cr);

  std::string ct_system, ct_grid = "101x101", ct_window = "-1,1,-1,1", ct_out;
  double ct_eps = -1.0;
  CLI::App* contour = app.add_subcommand("contour", "emit a CSV grid of ||G|| samples");
  contour->add_option("--system", ct_system, "system bundle")->required();
  contour->add_option("--eps", ct_eps, "epsilon (records the level eps^{-1})");
  contour->add_option("--grid", ct_grid, "NxM sample counts");
  contour->add_option("--window", ct_window, "x0,x1,y0,y1");
  contour->add_option("--out", ct_out, "output file (default stdout)");

  std::string bench_dir, bench_mode = "abscissa";
  double bench_eps = 0.01;
  std::uint64_t bench_seed = 100;
  CLI::App* bench = app.add_subcommand("bench", "compare improved vs directly-extended");
  bench->add_option("--dir", bench_dir, "directory of system bundles")->required();
  bench->add_option("--eps", bench_eps, "epsilon for manifests without one");
  bench->add_option("--mode", bench_mode, "abscissa|radius")
      ->check(CLI::IsMember({"abscissa", "radius"}));
  bench->add_option("--seed", bench_seed, "RNG seed");

  std::vector<const char*> argv;
  argv.push_back("svset");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help and friends
      out << app.help();
      return 0;
    }
    err << "error: bad-arguments: " << e.what() << "\n";
    return 2;
  }

  try {
    if (abscissa->parsed()) return run_solve(ca, Mode::Abscissa, out);
    if (radius->parsed()) return run_solve(cr, Mode::Radius, out);
    if (contour->parsed()) {
      SystemBundle b = load_bundle(ct_system);
      SvsProblem pb;
      pb.system = load_system(ct_system);
      pb.epsilon = ct_eps > 0 ? ct_eps : b.eps.value_or(-1.0);
      if (pb.epsilon <= 0)
        throw SvsError(ErrorClass::BadArguments, "no --eps given and the manifest has none");
      int nx = 0, ny = 0;
      if (std::sscanf(ct_grid.c_str(), "%dx%d", &nx, &ny) != 2)
        throw SvsError(ErrorClass::BadArguments, "--grid must look like 200x150");
      ContourWindow w;
      if (std::sscanf(ct_window.c_str(), "%lf,%lf,%lf,%lf", &w.x0, &w.x1, &w.y0, &w.y1) != 4)
        throw SvsError(ErrorClass::BadArguments, "--window must look like x0,x1,y0,y1");
      if (!ct_out.empty()) {
        std::ofstream f(ct_out);
        if (!f) throw SvsError(ErrorClass::IoError, "cannot write '" + ct_out + "'");
        emit_contour(f, pb, w, nx, ny);
      } else {
        emit_contour(out, pb, w, nx, ny);
      }
      return 0;
    }
    if (bench->parsed()) {
      SolverOptions base;
      base.rng_seed = bench_seed;
      return run_bench(bench_dir, bench_eps,
                       bench_mode == "abscissa" ? Mode::Abscissa : Mode::Radius, base, out);
    }
  } catch (const SvsError& e) {
    err << "error: " << e.slug() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: numerical-failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace svset
