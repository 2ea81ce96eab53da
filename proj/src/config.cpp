#include "csmom/config.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "csmom/farfield.hpp"
#include "csmom/krylov.hpp"
#include "csmom/mie.hpp"
#include "csmom/operators.hpp"
#include "csmom/spectrum.hpp"

namespace fs = std::filesystem;

namespace csmom {

namespace {

[[noreturn]] void bad_config(int line, const std::string& msg) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

double parse_double(const std::string& v, int line) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) bad_config(line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const std::invalid_argument&) {
    bad_config(line, "not a number: '" + v + "'");
  } catch (const std::out_of_range&) {
    bad_config(line, "number out of range: '" + v + "'");
  }
}

int parse_int(const std::string& v, int line) {
  const double d = parse_double(v, line);
  const int i = static_cast<int>(d);
  if (i != d) bad_config(line, "expected an integer: '" + v + "'");
  return i;
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_config(line, "expected true or false: '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, int line) {
  std::string s = v;
  for (auto& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok, line));
  if (out.empty()) bad_config(line, "empty list");
  return out;
}

}  // namespace

Mesh build_geometry(const GeometrySpec& g) {
  if (g.kind == "cube") return gen_cube(g.size, g.divisions);
  if (g.kind == "icosphere") return gen_icosphere(g.size, g.divisions);
  if (g.kind == "off") return load_off(g.path);
  throw std::invalid_argument("unknown geometry kind '" + g.kind + "'");
}

std::string geometry_id(const GeometrySpec& g) {
  std::ostringstream id;
  if (g.kind == "off") {
    id << "off:" << fs::path(g.path).filename().string();
  } else {
    id << g.kind << "-s" << g.size << "-d" << g.divisions;
  }
  return id.str();
}

std::vector<double> FrequencySpec::frequencies() const {
  std::vector<double> f;
  if (points == 1) {
    f.push_back(start_hz);
    return f;
  }
  for (int i = 0; i < points; ++i)
    f.push_back(start_hz + (stop_hz - start_hz) * i / (points - 1));
  return f;
}

PlaneWave build_wave(const WaveSpec& w) {
  const double th = w.theta_deg * pi / 180.0;
  const double ph = w.phi_deg * pi / 180.0;
  const Eigen::Vector3d khat(std::sin(th) * std::cos(ph),
                             std::sin(th) * std::sin(ph), std::cos(th));
  const Eigen::Vector3d that(std::cos(th) * std::cos(ph),
                             std::cos(th) * std::sin(ph), -std::sin(th));
  const Eigen::Vector3d phat(-std::sin(ph), std::cos(ph), 0.0);
  return {khat, w.polarization == "phi" ? phat : that, w.amplitude};
}

std::string FormulationSpec::tag() const {
  std::ostringstream t;
  t << to_string(cfg.kind);
  if (cfg.kind == FormulationKind::cfie) {
    t << "-c" << cfg.cfie_comb;
  } else if (cfg.kind == FormulationKind::csie_j ||
             cfg.kind == FormulationKind::csie_jm) {
    t << "-a" << cfg.alpha;
  }
  return t.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool single_freq_set = false, range_set = false;

  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  FormulationSpec* form = nullptr;

  while (std::getline(in, raw)) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') bad_config(line, "unterminated section header");
      section = s.substr(1, s.size() - 2);
      if (section == "formulation") {
        cfg.formulations.emplace_back();
        form = &cfg.formulations.back();
      } else if (section != "geometry" && section != "frequency" &&
                 section != "wave" && section != "solver" &&
                 section != "tradeoff" && section != "output") {
        bad_config(line, "unknown section [" + section + "]");
      }
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos) bad_config(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = unquote(trim(s.substr(eq + 1)));
    if (key.empty() || val.empty()) bad_config(line, "expected key = value");
    if (section.empty()) bad_config(line, "key outside any section");

    if (section == "geometry") {
      if (key == "kind") cfg.geometry.kind = val;
      else if (key == "size") cfg.geometry.size = parse_double(val, line);
      else if (key == "divisions") cfg.geometry.divisions = parse_int(val, line);
      else if (key == "path") cfg.geometry.path = val;
      else bad_config(line, "unknown geometry key '" + key + "'");
    } else if (section == "frequency") {
      if (key == "value_hz") {
        cfg.frequency.start_hz = cfg.frequency.stop_hz = parse_double(val, line);
        single_freq_set = true;
      } else if (key == "k0") {
        const double k0 = parse_double(val, line);
        if (k0 <= 0.0) bad_config(line, "k0 must be positive");
        cfg.frequency.start_hz = cfg.frequency.stop_hz = k0 * c0 / (2.0 * pi);
        single_freq_set = true;
      } else if (key == "start_hz") {
        cfg.frequency.start_hz = parse_double(val, line);
        range_set = true;
      } else if (key == "stop_hz") {
        cfg.frequency.stop_hz = parse_double(val, line);
        range_set = true;
      } else if (key == "points") {
        cfg.frequency.points = parse_int(val, line);
      } else {
        bad_config(line, "unknown frequency key '" + key + "'");
      }
      if (single_freq_set && range_set)
        bad_config(line, "give either value_hz/k0 or start_hz/stop_hz");
    } else if (section == "wave") {
      if (key == "theta_deg") cfg.wave.theta_deg = parse_double(val, line);
      else if (key == "phi_deg") cfg.wave.phi_deg = parse_double(val, line);
      else if (key == "polarization") cfg.wave.polarization = val;
      else if (key == "amplitude") cfg.wave.amplitude = parse_double(val, line);
      else bad_config(line, "unknown wave key '" + key + "'");
    } else if (section == "solver") {
      if (key == "tol") cfg.solver.tol = parse_double(val, line);
      else if (key == "max_iter") cfg.solver.max_iter = parse_int(val, line);
      else if (key == "restart") cfg.solver.restart = parse_int(val, line);
      else bad_config(line, "unknown solver key '" + key + "'");
    } else if (section == "formulation") {
      if (key == "kind") {
        try {
          form->cfg.kind = formulation_from_string(val);
        } catch (const std::invalid_argument& e) {
          bad_config(line, e.what());
        }
      } else if (key == "alpha") form->cfg.alpha = parse_double(val, line);
      else if (key == "comb") form->cfg.cfie_comb = parse_double(val, line);
      else if (key == "inner_tol") form->cfg.inner_tol = parse_double(val, line);
      else if (key == "inner_max_iter")
        form->cfg.inner_max_iter = parse_int(val, line);
      else if (key == "weighted") form->cfg.jm_weighting = parse_bool(val, line);
      else if (key == "precond") form->precond = parse_bool(val, line);
      else bad_config(line, "unknown formulation key '" + key + "'");
    } else if (section == "tradeoff") {
      if (key == "alphas") cfg.alphas = parse_list(val, line);
      else if (key == "combs") cfg.combs = parse_list(val, line);
      else bad_config(line, "unknown tradeoff key '" + key + "'");
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else if (key == "grid_step_deg")
        cfg.grid_step_deg = parse_double(val, line);
      else bad_config(line, "unknown output key '" + key + "'");
    }
  }

  // cross-field validation
  if (cfg.geometry.kind.empty())
    throw std::invalid_argument("config: geometry.kind is required");
  if (cfg.geometry.kind != "cube" && cfg.geometry.kind != "icosphere" &&
      cfg.geometry.kind != "off")
    throw std::invalid_argument("config: unknown geometry kind '" +
                                cfg.geometry.kind + "'");
  if (cfg.geometry.kind == "off") {
    if (cfg.geometry.path.empty())
      throw std::invalid_argument("config: geometry.path is required for off");
    if (!fs::exists(cfg.geometry.path))
      throw std::invalid_argument("config: no such file: " + cfg.geometry.path);
  }
  if (cfg.geometry.size <= 0.0)
    throw std::invalid_argument("config: geometry.size must be positive");
  if (cfg.geometry.divisions < 0 ||
      (cfg.geometry.kind == "cube" && cfg.geometry.divisions < 1))
    throw std::invalid_argument("config: geometry.divisions out of range");
  if (cfg.frequency.points < 1)
    throw std::invalid_argument("config: frequency.points must be >= 1");
  if (cfg.frequency.points > 1) {
    if (single_freq_set)
      throw std::invalid_argument("config: a single frequency cannot sweep");
    if (cfg.frequency.stop_hz < cfg.frequency.start_hz)
      throw std::invalid_argument("config: frequency.stop_hz < start_hz");
  }
  if ((single_freq_set || range_set || cfg.frequency.points > 1) &&
      cfg.frequency.start_hz <= 0.0)
    throw std::invalid_argument("config: frequencies must be positive");
  if (cfg.wave.polarization != "theta" && cfg.wave.polarization != "phi")
    throw std::invalid_argument("config: wave.polarization must be theta or phi");
  if (cfg.wave.amplitude <= 0.0)
    throw std::invalid_argument("config: wave.amplitude must be positive");
  if (!(cfg.solver.tol > 0.0) || cfg.solver.tol >= 1.0)
    throw std::invalid_argument("config: solver.tol must be in (0, 1)");
  if (cfg.solver.max_iter < 1 || cfg.solver.restart < 0)
    throw std::invalid_argument("config: solver iteration limits out of range");
  if (!(cfg.grid_step_deg > 0.0) || cfg.grid_step_deg > 90.0)
    throw std::invalid_argument("config: grid_step_deg must be in (0, 90]");
  for (const auto& f : cfg.formulations) {
    if (f.precond && (f.cfg.kind == FormulationKind::mfie ||
                      f.cfg.kind == FormulationKind::cfie))
      throw std::invalid_argument(
          "config: no diagonal preconditioner for " + std::string(to_string(f.cfg.kind)));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

namespace {

using json = nlohmann::json;

std::uint64_t fnv1a_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["geometry"] = {{"kind", cfg.geometry.kind},
                   {"size", cfg.geometry.size},
                   {"divisions", cfg.geometry.divisions},
                   {"path", cfg.geometry.path}};
  j["frequency"] = {{"start_hz", cfg.frequency.start_hz},
                    {"stop_hz", cfg.frequency.stop_hz},
                    {"points", cfg.frequency.points}};
  j["wave"] = {{"theta_deg", cfg.wave.theta_deg},
               {"phi_deg", cfg.wave.phi_deg},
               {"polarization", cfg.wave.polarization},
               {"amplitude", cfg.wave.amplitude}};
  j["solver"] = {{"tol", cfg.solver.tol},
                 {"max_iter", cfg.solver.max_iter},
                 {"restart", cfg.solver.restart}};
  j["formulations"] = json::array();
  for (const auto& f : cfg.formulations)
    j["formulations"].push_back({{"tag", f.tag()},
                                 {"alpha", f.cfg.alpha},
                                 {"comb", f.cfg.cfie_comb},
                                 {"inner_tol", f.cfg.inner_tol},
                                 {"inner_max_iter", f.cfg.inner_max_iter},
                                 {"weighted", f.cfg.jm_weighting},
                                 {"precond", f.precond}});
  j["tradeoff"] = {{"alphas", cfg.alphas}, {"combs", cfg.combs}};
  j["output"] = {{"grid_step_deg", cfg.grid_step_deg}};
  return j;
}

// Written last, single-threaded, with content hashes of every artifact.
void write_manifest(const fs::path& out, const ExperimentConfig& cfg,
                    const RunSummary& summary,
                    std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  json j;
  j["config"] = config_json(cfg);
  j["summary"] = {{"attempted", summary.attempted}, {"failed", summary.failed}};
  j["artifacts"] = json::array();
  for (const auto& f : files)
    j["artifacts"].push_back({{"file", f}, {"fnv1a", hex64(fnv1a_file(out / f))}});
  std::ofstream os(out / "manifest.json");
  if (!os) throw std::runtime_error("cannot write manifest");
  os << j.dump(2) << "\n";
}

AssemblyRequest formulation_needs(FormulationKind k) {
  AssemblyRequest r;
  switch (k) {
    case FormulationKind::efie: r.want_T = true; break;
    case FormulationKind::mfie: r.want_K_nxbeta = true; break;
    case FormulationKind::cfie: r.want_T = r.want_K_nxbeta = true; break;
    case FormulationKind::csie_j:
    case FormulationKind::csie_jm: r.want_T = r.want_K_beta = true; break;
  }
  return r;
}

// Loads requested matrices from the cache directory where present, assembles
// the rest in one sweep, and stores the newly assembled ones (via a rename so
// concurrent readers never see a partial file).
OperatorSet assemble_cached(const RwgBasis& basis, double k0,
                            const AssemblyRequest& req,
                            const std::string& cache_dir) {
  if (cache_dir.empty()) return assemble_operators(basis, k0, {}, req);

  fs::create_directories(cache_dir);
  const QuadratureConfig quad{};
  OperatorSet out;
  AssemblyRequest missing;
  struct Slot {
    bool wanted;
    const char* kind;
    Eigen::MatrixXcd* dst;
    bool* missing;
    fs::path path;
  };
  Slot slots[] = {
      {req.want_T, "T", &out.T, &missing.want_T, {}},
      {req.want_K_beta, "K_beta", &out.K_beta, &missing.want_K_beta, {}},
      {req.want_K_nxbeta, "K_nxbeta", &out.K_nxbeta, &missing.want_K_nxbeta, {}},
  };
  for (auto& s : slots) {
    if (!s.wanted) continue;
    const auto key = operator_cache_key(basis.mesh(), k0, quad, s.kind);
    s.path = fs::path(cache_dir) / (hex64(key) + ".mat");
    if (fs::exists(s.path))
      *s.dst = load_matrix(s.path.string());
    else
      *s.missing = true;
  }
  if (missing.want_T || missing.want_K_beta || missing.want_K_nxbeta) {
    OperatorSet fresh = assemble_operators(basis, k0, quad, missing);
    for (auto& s : slots) {
      if (!s.wanted || !*s.missing) continue;
      if (s.dst == &out.T) *s.dst = std::move(fresh.T);
      else if (s.dst == &out.K_beta) *s.dst = std::move(fresh.K_beta);
      else *s.dst = std::move(fresh.K_nxbeta);
      const fs::path tmp = s.path.string() + ".tmp";
      save_matrix(tmp.string(), *s.dst);
      fs::rename(tmp, s.path);
    }
  }
  return out;
}

std::unique_ptr<LinearOperator> build_formulation(
    const FormulationSpec& f, const OperatorSet& ops, const SparseRealMatrix& A,
    const SparseRealMatrix& Ap, double k0) {
  switch (f.cfg.kind) {
    case FormulationKind::efie: return build_efie(ops.T, k0);
    case FormulationKind::mfie: return build_mfie(Ap, ops.K_nxbeta);
    case FormulationKind::cfie:
      return build_cfie(ops.T, Ap, ops.K_nxbeta, f.cfg.cfie_comb, k0);
    case FormulationKind::csie_j:
      return build_csie_j(ops.T, ops.K_beta, A, Ap, f.cfg, k0);
    case FormulationKind::csie_jm:
      return build_csie_jm(ops.T, ops.K_beta, A, Ap, f.cfg, k0);
  }
  throw std::logic_error("unreachable");
}

Precond build_precond(const FormulationSpec& f, const OperatorSet& ops,
                      const SparseRealMatrix& A, const SparseRealMatrix& Ap,
                      double k0) {
  switch (f.cfg.kind) {
    case FormulationKind::efie: return efie_diag_precond(ops.T, k0);
    case FormulationKind::csie_j:
      return csie_diag_precond(ops.T, A, Ap, f.cfg, k0);
    case FormulationKind::csie_jm:
      return csie_jm_diag_precond(ops.T, Ap, f.cfg, k0);
    default:
      throw std::invalid_argument("no diagonal preconditioner for " +
                                  std::string(to_string(f.cfg.kind)));
  }
}

void parallel_over(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int count = std::min(threads, n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

std::string run_name(const char* prefix, const std::string& tag, int fi) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_f%02d.csv", fi);
  return std::string(prefix) + "_" + tag + buf;
}

struct SolveRow {
  double frequency_hz = 0.0;
  std::string tag;
  int n = 0;
  std::string status = "not run";
  int iterations = -1;
  double achieved = std::numeric_limits<double>::quiet_NaN();
  long matvecs = 0;
  double inner_mean = 0.0;
  double error_db = std::numeric_limits<double>::quiet_NaN();
};

fs::path resolve_out(const ExperimentConfig& cfg, const RunOptions& opt) {
  const fs::path out = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
  fs::create_directories(out);
  return out;
}

void require_frequency(const ExperimentConfig& cfg) {
  if (cfg.frequency.start_hz <= 0.0)
    throw std::invalid_argument("config: a frequency section is required");
}

void require_formulations(const ExperimentConfig& cfg) {
  if (cfg.formulations.empty())
    throw std::invalid_argument("config: at least one formulation is required");
}

}  // namespace

RunSummary cmd_solve(const ExperimentConfig& cfg, const RunOptions& opt) {
  require_formulations(cfg);
  require_frequency(cfg);
  const fs::path out = resolve_out(cfg, opt);

  const RwgBasis basis(build_geometry(cfg.geometry));
  const auto A = assemble_gram_A(basis);
  const auto Ap = assemble_gram_Aprime(basis);
  const PlaneWave pw = build_wave(cfg.wave);
  const auto dirs = direction_grid(cfg.grid_step_deg);
  const auto freqs = cfg.frequency.frequencies();
  const int nf = static_cast<int>(freqs.size());
  const int ns = static_cast<int>(cfg.formulations.size());

  AssemblyRequest all_needs;
  bool any_h = false;
  for (const auto& f : cfg.formulations) {
    const auto r = formulation_needs(f.cfg.kind);
    all_needs.want_T |= r.want_T;
    all_needs.want_K_beta |= r.want_K_beta;
    all_needs.want_K_nxbeta |= r.want_K_nxbeta;
    any_h |= f.cfg.kind == FormulationKind::mfie ||
             f.cfg.kind == FormulationKind::cfie;
  }

  std::vector<SolveRow> rows(nf * ns);
  std::vector<std::vector<std::string>> files(nf);
  std::atomic<int> failed{0};

  parallel_over(nf, opt.threads, [&](int fi) {
    const auto ctx = PhysicalContext::from_frequency(freqs[fi]);
    for (int si = 0; si < ns; ++si) {
      rows[fi * ns + si].frequency_hz = freqs[fi];
      rows[fi * ns + si].tag = cfg.formulations[si].tag();
      rows[fi * ns + si].n = basis.size();
    }
    try {
      const OperatorSet ops =
          assemble_cached(basis, ctx.k0, all_needs, opt.cache_dir);
      const Eigen::VectorXcd e = rhs_efie(basis, pw, ctx.k0);
      const Eigen::VectorXcd h =
          any_h ? rhs_mfie(basis, pw, ctx.k0) : Eigen::VectorXcd();
      FarFieldSet ref;
      if (cfg.geometry.kind == "icosphere")
        ref = mie_far_field(cfg.geometry.size, ctx, pw, dirs);

      for (int si = 0; si < ns; ++si) {
        SolveRow& row = rows[fi * ns + si];
        const FormulationSpec& f = cfg.formulations[si];
        try {
          const auto op = build_formulation(f, ops, A, Ap, ctx.k0);
          GmresOptions gopt;
          gopt.tol = cfg.solver.tol;
          gopt.max_iter = cfg.solver.max_iter;
          gopt.restart = cfg.solver.restart;
          if (f.precond) gopt.precond = build_precond(f, ops, A, Ap, ctx.k0);
          const auto r =
              gmres(*op, formulation_rhs(f.cfg, ctx.k0, e, h), gopt);

          row.status = to_string(r.report.status);
          row.iterations = r.report.iterations;
          row.achieved = r.report.achieved_residual;
          row.matvecs = r.report.matvec_count;
          row.inner_mean = r.report.mean_inner_per_matvec;

          const std::string rname = run_name("residuals", row.tag, fi);
          write_residual_csv(r.report, (out / rname).string());
          files[fi].push_back(rname);
          if (!r.report.success()) {
            failed.fetch_add(1);
            continue;
          }

          const SurfaceCurrents sc = split_solution(f.cfg, r.x, A, Ap);
          FarFieldSet ff = far_field(basis, sc.electric, sc.magnetic, ctx, dirs);
          ff.label = row.tag;
          ff.alpha = f.cfg.alpha;
          ff.frequency_hz = freqs[fi];
          ff.mesh_id = geometry_id(cfg.geometry);
          ff.unknowns = basis.size();
          const std::string fname = run_name("farfield", row.tag, fi);
          const std::string cname = run_name("rcs", row.tag, fi);
          write_farfield_csv(ff, (out / fname).string());
          write_rcs_csv(ff, pw, (out / cname).string());
          files[fi].push_back(fname);
          files[fi].push_back(cname);
          if (!ref.directions.empty()) row.error_db = farfield_error_db(ff, ref);
        } catch (const std::exception& ex) {
          row.status = "error: " + sanitize(ex.what());
          failed.fetch_add(1);
        }
      }
    } catch (const std::exception& ex) {
      for (int si = 0; si < ns; ++si)
        rows[fi * ns + si].status = "error: " + sanitize(ex.what());
      failed.fetch_add(ns);
    }
  });

  std::ofstream sum(out / "summary.csv");
  if (!sum) throw std::runtime_error("cannot write summary.csv");
  sum << std::scientific << std::setprecision(16);
  sum << "frequency_hz,formulation,n,status,iterations,achieved_residual,"
         "matvecs,mean_inner_per_matvec,error_db\n";
  for (const auto& r : rows) {
    sum << r.frequency_hz << ',' << r.tag << ',' << r.n << ',' << r.status
        << ',' << r.iterations << ',' << r.achieved << ',' << r.matvecs << ','
        << r.inner_mean << ',';
    if (std::isnan(r.error_db))
      sum << '\n';
    else
      sum << r.error_db << '\n';
  }
  sum.close();

  RunSummary summary{nf * ns, failed.load()};
  std::vector<std::string> all_files{"summary.csv"};
  for (const auto& fv : files) all_files.insert(all_files.end(), fv.begin(), fv.end());
  write_manifest(out, cfg, summary, std::move(all_files));
  return summary;
}

RunSummary cmd_spectrum(const ExperimentConfig& cfg, const RunOptions& opt) {
  require_formulations(cfg);
  require_frequency(cfg);
  const fs::path out = resolve_out(cfg, opt);

  const RwgBasis basis(build_geometry(cfg.geometry));
  const auto A = assemble_gram_A(basis);
  const auto Ap = assemble_gram_Aprime(basis);
  const auto freqs = cfg.frequency.frequencies();
  const int nf = static_cast<int>(freqs.size());
  const int ns = static_cast<int>(cfg.formulations.size());

  AssemblyRequest all_needs;
  for (const auto& f : cfg.formulations) {
    const auto r = formulation_needs(f.cfg.kind);
    all_needs.want_T |= r.want_T;
    all_needs.want_K_beta |= r.want_K_beta;
    all_needs.want_K_nxbeta |= r.want_K_nxbeta;
  }

  struct SpecRow {
    double frequency_hz;
    std::string tag, status;
    int size = 0;
    double condition = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<SpecRow> rows(nf * ns);
  std::vector<std::vector<std::string>> files(nf);
  std::atomic<int> failed{0};

  parallel_over(nf, opt.threads, [&](int fi) {
    const auto ctx = PhysicalContext::from_frequency(freqs[fi]);
    try {
      const OperatorSet ops =
          assemble_cached(basis, ctx.k0, all_needs, opt.cache_dir);
      for (int si = 0; si < ns; ++si) {
        SpecRow& row = rows[fi * ns + si];
        const FormulationSpec& f = cfg.formulations[si];
        row.frequency_hz = freqs[fi];
        row.tag = f.tag();
        const int m = f.cfg.kind == FormulationKind::csie_jm ? 2 * basis.size()
                                                             : basis.size();
        if (m > 4000) {
          row.status = "error: size guard exceeded";
          failed.fetch_add(1);
          continue;
        }
        try {
          const auto op = build_formulation(f, ops, A, Ap, ctx.k0);
          const SpectrumReport rep = singular_spectrum(op->materialize());
          row.status = "ok";
          row.size = rep.size;
          row.condition = rep.condition;
          const std::string sname = run_name("spectrum", row.tag, fi);
          write_spectrum_csv(rep, (out / sname).string());
          files[fi].push_back(sname);
        } catch (const std::exception& ex) {
          row.status = "error: " + sanitize(ex.what());
          failed.fetch_add(1);
        }
      }
    } catch (const std::exception& ex) {
      for (int si = 0; si < ns; ++si) {
        rows[fi * ns + si].frequency_hz = freqs[fi];
        rows[fi * ns + si].tag = cfg.formulations[si].tag();
        rows[fi * ns + si].status = "error: " + sanitize(ex.what());
      }
      failed.fetch_add(ns);
    }
  });

  std::ofstream cond(out / "conditions.csv");
  if (!cond) throw std::runtime_error("cannot write conditions.csv");
  cond << std::scientific << std::setprecision(16);
  cond << "frequency_hz,formulation,size,status,condition\n";
  for (const auto& r : rows)
    cond << r.frequency_hz << ',' << r.tag << ',' << r.size << ',' << r.status
         << ',' << r.condition << '\n';
  cond.close();

  RunSummary summary{nf * ns, failed.load()};
  std::vector<std::string> all_files{"conditions.csv"};
  for (const auto& fv : files) all_files.insert(all_files.end(), fv.begin(), fv.end());
  write_manifest(out, cfg, summary, std::move(all_files));
  return summary;
}

RunSummary cmd_mesh_info(const ExperimentConfig& cfg, const RunOptions& opt) {
  const fs::path out = resolve_out(cfg, opt);
  const Mesh mesh = build_geometry(cfg.geometry);
  const double k0 =
      cfg.frequency.start_hz > 0.0
          ? PhysicalContext::from_frequency(cfg.frequency.start_hz).k0
          : 0.0;
  write_quality_csv(mesh_quality(mesh, k0), (out / "quality.csv").string());
  write_manifest(out, cfg, {1, 0}, {"quality.csv"});
  return {1, 0};
}

RunSummary cmd_alpha_tradeoff(const ExperimentConfig& cfg,
                              const RunOptions& opt) {
  if (cfg.alphas.empty() && cfg.combs.empty())
    throw std::invalid_argument("config: tradeoff needs alphas or combs");
  require_frequency(cfg);
  if (cfg.frequency.points != 1)
    throw std::invalid_argument("config: tradeoff runs at a single frequency");
  const fs::path out = resolve_out(cfg, opt);

  const RwgBasis basis(build_geometry(cfg.geometry));
  const auto A = assemble_gram_A(basis);
  const auto Ap = assemble_gram_Aprime(basis);
  const PlaneWave pw = build_wave(cfg.wave);
  const auto ctx = PhysicalContext::from_frequency(cfg.frequency.start_hz);
  const auto dirs = direction_grid(cfg.grid_step_deg);

  AssemblyRequest req;
  req.want_T = req.want_K_beta = true;
  req.want_K_nxbeta = !cfg.combs.empty();
  const OperatorSet ops = assemble_cached(basis, ctx.k0, req, opt.cache_dir);
  const Eigen::VectorXcd e = rhs_efie(basis, pw, ctx.k0);
  const Eigen::VectorXcd h =
      cfg.combs.empty() ? Eigen::VectorXcd() : rhs_mfie(basis, pw, ctx.k0);

  // Error reference: the analytic sphere where available, otherwise a tightly
  // converged same-mesh field solution.
  FarFieldSet ref;
  if (cfg.geometry.kind == "icosphere") {
    ref = mie_far_field(cfg.geometry.size, ctx, pw, dirs);
  } else {
    GmresOptions gopt;
    gopt.tol = std::min(cfg.solver.tol, 1e-6);
    gopt.max_iter = std::max(cfg.solver.max_iter, 2000);
    const auto r = gmres(*build_efie(ops.T, ctx.k0), e, gopt);
    if (!r.report.success())
      throw std::runtime_error("reference solve failed: " +
                               std::string(to_string(r.report.status)));
    ref = far_field(basis, r.x, {}, ctx, dirs);
  }

  struct TradeRow {
    std::string kind;
    double parameter;
    std::string status = "ok";
    int iterations = -1;
    double error_db = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<TradeRow> rows;
  int failed = 0;

  auto run_one = [&](const FormulationSpec& f, double parameter) {
    TradeRow row{std::string(to_string(f.cfg.kind)), parameter, "ok", -1,
                 std::numeric_limits<double>::quiet_NaN()};
    try {
      const auto op = build_formulation(f, ops, A, Ap, ctx.k0);
      GmresOptions gopt;
      gopt.tol = cfg.solver.tol;
      gopt.max_iter = cfg.solver.max_iter;
      gopt.restart = cfg.solver.restart;
      const auto r = gmres(*op, formulation_rhs(f.cfg, ctx.k0, e, h), gopt);
      row.status = to_string(r.report.status);
      row.iterations = r.report.iterations;
      if (r.report.success()) {
        const SurfaceCurrents sc = split_solution(f.cfg, r.x, A, Ap);
        FarFieldSet ff = far_field(basis, sc.electric, sc.magnetic, ctx, dirs);
        row.error_db = farfield_error_db(ff, ref);
      } else {
        ++failed;
      }
    } catch (const std::exception& ex) {
      row.status = "error: " + sanitize(ex.what());
      ++failed;
    }
    rows.push_back(std::move(row));
  };

  for (double a : cfg.alphas) {
    FormulationSpec f;
    f.cfg.kind = FormulationKind::csie_j;
    f.cfg.alpha = a;
    run_one(f, a);
  }
  for (double c : cfg.combs) {
    FormulationSpec f;
    f.cfg.kind = FormulationKind::cfie;
    f.cfg.cfie_comb = c;
    run_one(f, c);
  }

  std::ofstream tsv(out / "alpha_tradeoff.csv");
  if (!tsv) throw std::runtime_error("cannot write alpha_tradeoff.csv");
  tsv << std::scientific << std::setprecision(16);
  tsv << "kind,parameter,status,iterations,error_db\n";
  for (const auto& r : rows)
    tsv << r.kind << ',' << r.parameter << ',' << r.status << ','
        << r.iterations << ',' << r.error_db << '\n';
  tsv.close();

  RunSummary summary{static_cast<int>(rows.size()), failed};
  write_manifest(out, cfg, summary, {"alpha_tradeoff.csv"});
  return summary;
}

}  // namespace csmom
