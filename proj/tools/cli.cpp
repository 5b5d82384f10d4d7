#include "cli.hpp"

#include "maglap/assemble.hpp"
#include "maglap/field_core.hpp"
#include "maglap/grid.hpp"
#include "maglap/harness.hpp"
#include "maglap/model_problems.hpp"
#include "maglap/spectral.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace maglap::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- polynomial text

class PolyParser {
 public:
  PolyParser(const std::string& s, std::size_t dim) : s_(s), dim_(dim) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("polynomial \"" + s_ + "\" at offset " + std::to_string(i_) + ": " + what);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  Polynomial expr() {
    Polynomial p(dim_);
    bool first = true;
    for (;;) {
      double sign = 1.0;
      if (eat('-')) sign = -1.0;
      else if (!eat('+') && !first) break;
      p = p + sign * term();
      first = false;
    }
    return p;
  }
  Polynomial term() {
    Polynomial p = power();
    while (eat('*')) p = p * power();
    return p;
  }
  Polynomial power() {
    Polynomial base = atom();
    if (!eat('^')) return base;
    skip();
    std::size_t j = i_;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
    if (j == i_) fail("expected a non-negative integer exponent");
    const int e = std::stoi(s_.substr(i_, j - i_));
    i_ = j;
    Polynomial p = Polynomial::constant(dim_, 1.0);
    for (int k = 0; k < e; ++k) p = p * base;
    return p;
  }
  Polynomial atom() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      Polynomial p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (s_[i_] == 'x') {
      ++i_;
      std::size_t j = i_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      if (j == i_) fail("expected a variable index after 'x'");
      const long k = std::stol(s_.substr(i_, j - i_));
      if (k < 1 || static_cast<std::size_t>(k) > dim_) fail("variable x" + std::to_string(k) + " out of range");
      i_ = j;
      return Polynomial::coordinate(dim_, static_cast<std::size_t>(k - 1));
    }
    const char* begin = s_.c_str() + i_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number, variable or '('");
    i_ += static_cast<std::size_t>(end - begin);
    return Polynomial::constant(dim_, v);
  }

  const std::string& s_;
  std::size_t dim_;
  std::size_t i_ = 0;
};

// ---------------------------------------------------------------- typed json access

/// Reads keys from a JSON object and rejects any key that was never asked for.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError(where(key) + ": required key missing");
    return j_.at(key);
  }
  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    return v.get<double>();
  }
  long integer(const std::string& key, std::optional<long> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    return v.get<long>();
  }
  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def = std::nullopt) {
    if (!has(key)) return required(key, def);
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Eigen::VectorXd vector(const std::string& key) {
    const auto v = numbers(key);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  std::string where(const std::string& key) const { return path_ + "." + key; }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(where(k) + ": unknown key");
  }

 private:
  template <class T>
  T required(const std::string& key, const std::optional<T>& def) const {
    if (!def) throw ConfigError(where(key) + ": required key missing");
    return *def;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

PolyMatrixField parse_field(const json& j) {
  Block b(j, "field");
  const long dim = b.integer("dim", 2);
  if (dim < 2 || dim > 9) throw ConfigError("field.dim: must be between 2 and 9");
  const auto d = static_cast<std::size_t>(dim);
  const json& comps = b.raw("B");
  if (!comps.is_object() || comps.empty()) throw ConfigError("field.B: expected an object like {\"12\": \"x1\"}");
  std::map<std::pair<std::size_t, std::size_t>, Polynomial> upper;
  for (const auto& [key, val] : comps.items()) {
    const std::string path = "field.B." + key;
    if (key.size() != 2 || !std::isdigit(static_cast<unsigned char>(key[0])) ||
        !std::isdigit(static_cast<unsigned char>(key[1])))
      throw ConfigError(path + ": component keys are two indices jl with 1 <= j < l <= dim");
    const std::size_t j = static_cast<std::size_t>(key[0] - '0'), l = static_cast<std::size_t>(key[1] - '0');
    if (j < 1 || l <= j || l > d) throw ConfigError(path + ": component keys are two indices jl with 1 <= j < l <= dim");
    if (!val.is_string()) throw ConfigError(path + ": expected a polynomial string");
    try {
      upper[{j - 1, l - 1}] = parse_polynomial(val.get<std::string>(), d);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  b.finish();
  return PolyMatrixField::from_upper(d, upper);
}

DomainSpec parse_domain(const json& j) {
  Block b(j, "domain");
  const std::string type = b.string("type");
  try {
    std::optional<DomainSpec> out;
    if (type == "rectangle") {
      out = make_rectangle(b.vector("center"), b.vector("sides"));
    } else if (type == "disk") {
      out = make_disk(b.vector("center"), b.number("radius"));
    } else if (type == "star") {
      out = make_star(b.vector("center"), b.numbers("cos"), b.numbers("sin", std::vector<double>{}));
    } else if (type == "half_space_box") {
      out = make_half_space_box(b.vector("normal"), b.number("half_width"));
    } else {
      throw ConfigError("domain.type: unknown domain type \"" + type + "\"");
    }
    b.finish();
    return *out;
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
}

std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos, 16);
    if (pos != s.size()) throw ConfigError("seed: expected a hexadecimal value");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("seed: expected a hexadecimal value");
  }
}

BoundaryCondition bc_of(const std::string& key, const std::string& s) {
  try {
    return parse_boundary_condition(s);
  } catch (const std::exception&) {
    throw ConfigError(key + ": unknown boundary condition \"" + s + "\"");
  }
}

// ---------------------------------------------------------------- csv helpers

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string coords(const Point& x) {
  std::string s;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += (k ? " " : "") + g17(x[k]);
  return s;
}

std::string pretty(const Point& x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (Eigen::Index k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
  os << ")";
  return os.str();
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) { std::filesystem::create_directories(dir_); }
  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    f << kCsvStamp << "\n";
    return f;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  std::filesystem::path dir_;
};

// ---------------------------------------------------------------- task options

SolverOptions solver_options(Block& t, const RunConfig& cfg) {
  SolverOptions s;
  s.tol = t.number("tol", 1e-8);
  s.max_iter = static_cast<int>(t.integer("max_iter", 300));
  s.block = static_cast<int>(t.integer("block", 2));
  s.seed = cfg.seed;
  if (!(s.tol > 0) || s.max_iter < 1 || s.block < 1 || s.block > 4)
    throw ConfigError("task: tol must be positive, max_iter >= 1, 1 <= block <= 4");
  return s;
}

GammaOptions gamma_options(Block& t) {
  GammaOptions g;
  g.grid_step = t.number("grid_step", g.grid_step);
  g.boundary_count = static_cast<int>(t.integer("boundary_count", g.boundary_count));
  g.kappa_max = static_cast<int>(t.integer("kappa_max", g.kappa_max));
  g.tol = t.number("vanishing_tol", g.tol);
  return g;
}

GridRule grid_rule(Block& t) {
  GridRule r;
  r.nodes_per_length = t.number("nodes_per_length", r.nodes_per_length);
  r.min_nodes = static_cast<int>(t.integer("min_nodes", r.min_nodes));
  r.max_nodes = static_cast<int>(t.integer("max_nodes", r.max_nodes));
  return r;
}

ThetaOptions theta_options(Block& t, const SolverOptions& solver) {
  ThetaOptions o;
  o.r_list = t.numbers("r_list", o.r_list);
  o.h_rule.value = t.number("h_per_radius", o.h_rule.value);
  o.max_points = static_cast<std::size_t>(t.integer("max_points", 8));
  o.solver = solver;
  return o;
}

const DomainSpec& need_domain(const RunConfig& cfg) {
  if (!cfg.domain) throw ConfigError("domain: required block missing");
  return *cfg.domain;
}

int kappa_for(const GammaReport& g, BoundaryCondition bc) {
  return bc == BoundaryCondition::dtn ? g.kappa_0 : g.kappa_star;
}

// ---------------------------------------------------------------- commands

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  Block t(cfg.task, "task");
  const GammaOptions go = gamma_options(t);
  const double step = t.number("profile_step", 0.1);
  if (!(step > 0)) throw ConfigError("task.profile_step: must be positive");
  t.finish();
  const DomainSpec& dom = need_domain(cfg);
  const PolyMatrixField& b = cfg.field;

  const GammaReport g = classify_gamma(b, dom, go);
  const Output o(cfg.out_dir);
  out << "kappa* = " << g.kappa_star << "\n";
  out << "kappa_0 = " << g.kappa_0 << "\n";
  out << "samples: " << g.interior_samples << " interior, " << g.boundary_samples << " boundary\n";

  auto gamma_csv = o.open("gamma.csv");
  gamma_csv << "set,x,kappa,v_dim,sigma,tau\n";
  auto section = [&](const char* name, const std::vector<GammaPoint>& pts, bool boundary) {
    out << name << ": " << pts.size() << " point" << (pts.size() == 1 ? "" : "s") << "\n";
    std::size_t shown = 0;
    for (const auto& p : pts) {
      std::string vdim, sig, ta;
      std::ostringstream line;
      line << "  " << pretty(p.x) << " kappa " << p.kappa;
      if (p.kappa > 0) {
        const ModelData md = taylor_model(b, p.x, go.tol);
        vdim = std::to_string(md.v_basis.cols());
        sig = g17(md.sigma);
        line << " dim V " << vdim << " sigma " << md.sigma;
        if (boundary) {
          const double tv = tau(md.v_basis, p.normal);
          ta = g17(tv);
          line << " tau " << tv;
        }
      }
      if (shown++ < 12) out << line.str() << "\n";
      gamma_csv << name << "," << coords(p.x) << "," << p.kappa << "," << vdim << "," << sig << "," << ta << "\n";
    }
    if (pts.size() > 12) out << "  ... " << pts.size() - 12 << " more in gamma.csv\n";
  };
  section("gamma1", g.gamma1, false);
  section("gamma2", g.gamma2, true);
  section("gamma0", g.gamma0, true);

  auto prof = o.open("m_profile.csv");
  prof << "x,m,m_tilde\n";
  const auto [lo, hi] = dom.bounding_box();
  const std::size_t d = dom.dim();
  std::vector<long> n(d);
  for (std::size_t k = 0; k < d; ++k)
    n[k] = static_cast<long>(std::floor((hi - lo)[static_cast<Eigen::Index>(k)] / step + 1e-9)) + 1;
  std::vector<long> idx(d, 0);
  const FieldNormEvaluator ev(b);
  std::size_t rows = 0;
  for (;;) {
    Point x(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k)
      x[static_cast<Eigen::Index>(k)] = lo[static_cast<Eigen::Index>(k)] + static_cast<double>(idx[k]) * step;
    if (inside_closed(dom, x)) {
      const double mt = m_tilde(b, x);
      prof << coords(x) << "," << g17(m_exact(ev, x, mt)) << "," << g17(mt) << "\n";
      ++rows;
    }
    std::size_t k = 0;
    while (k < d && ++idx[k] == n[k]) idx[k++] = 0;
    if (k == d) break;
  }
  out << "m profile: " << rows << " points -> " << o.path("m_profile.csv") << "\n";
  return 0;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  Block t(cfg.task, "task");
  const double beta = t.number("beta");
  const BoundaryCondition bc = bc_of("task.bc", t.string("bc", std::string("dirichlet")));
  const double h = t.has("h") ? t.number("h") : 0.0;  // 0: use the grid rule
  const GridRule rule = grid_rule(t);
  const long kappa = t.has("kappa") ? t.integer("kappa") : -1;  // -1: from the zero set
  const SolverOptions so = solver_options(t, cfg);
  t.finish();
  if (!(beta >= 0)) throw ConfigError("task.beta: must be non-negative");
  if (h < 0) throw ConfigError("task.h: must be positive");
  const DomainSpec& dom = need_domain(cfg);

  SweepPlan plan;
  plan.field = cfg.field;
  plan.domain = dom;
  double spacing = h;
  if (spacing == 0.0) {
    const int k = kappa >= 0                ? static_cast<int>(kappa)
                  : cfg.field.is_zero() ? 0
                                        : kappa_for(classify_gamma(cfg.field, dom), bc);
    spacing = rule.spacing(dom, beta, k);
  }
  const auto fs = assemble(build_grid(dom, spacing), plan.potential(), beta, bc);
  const SpectralResult r = bc == BoundaryCondition::dtn ? dtn_ground_state(fs, so) : ground_state(fs, so);

  const Output o(cfg.out_dir);
  auto f = o.open("solve.csv");
  const std::string row = g17(beta) + "," + to_string(bc) + "," + g17(spacing) + "," + g17(r.lambda) + "," +
                          g17(r.residual) + "," + std::to_string(r.iterations) + "," + std::to_string(r.n_dofs);
  f << "beta,bc,h,lambda,residual,iterations,n_dofs\n" << row << "\n";
  out << "beta,bc,h,lambda,residual,iterations,n_dofs\n" << row << "\n";
  return 0;
}

struct SweepSetup {
  SweepPlan plan;
  GammaReport gamma;
};

SweepSetup sweep_setup(Block& t, const RunConfig& cfg) {
  SweepSetup s;
  s.plan.field = cfg.field;
  s.plan.bc = bc_of("task.bc", t.string("bc", std::string("dirichlet")));
  s.plan.beta_list = t.numbers("betas");
  s.plan.grid = grid_rule(t);
  s.plan.coarse_pass = t.boolean("coarse_pass", true);
  s.plan.solver = solver_options(t, cfg);
  s.plan.threads = cfg.threads;
  if (t.has("kappa")) s.plan.kappa = static_cast<int>(t.integer("kappa"));
  else s.plan.kappa = -1;
  return s;
}

void finish_setup(SweepSetup& s, const RunConfig& cfg, const GammaOptions& go) {
  s.plan.domain = need_domain(cfg);
  if (cfg.field.is_zero()) throw ConfigError("field: sweeps need a nonzero field");
  s.gamma = classify_gamma(cfg.field, s.plan.domain, go);
  if (s.plan.kappa < 0) s.plan.kappa = kappa_for(s.gamma, s.plan.bc);
  try {
    s.plan.validate();
  } catch (const HarnessError& e) {
    throw ConfigError(std::string("task: ") + e.what());
  }
}

void report_sweep(std::ostream& out, const std::vector<SweepRecord>& rec) {
  out << "      beta          lambda         h   nodes  it   h-change\n";
  char buf[160];
  for (const auto& r : rec) {
    std::snprintf(buf, sizeof buf, "%10.4g  %14.8g  %8.3g  %6zu  %2d  %9.2e\n", r.beta, r.lambda, r.h, r.n_nodes,
                  r.iterations, r.h_change());
    out << buf;
  }
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  Block t(cfg.task, "task");
  SweepSetup s = sweep_setup(t, cfg);
  const GammaOptions go = gamma_options(t);
  const double tol = t.number("exponent_tolerance", -1.0);
  t.finish();
  finish_setup(s, cfg, go);

  const auto rec = run_sweep(s.plan);
  const auto rep = verify_leading_order(s.plan, rec, s.plan.kappa, tol);
  const Output o(cfg.out_dir);
  auto sw = o.open("sweep.csv");
  write_sweep_csv(sw, rec);
  auto fit = o.open("fit.csv");
  write_fit_csv(fit, rep, std::nan(""), rep.pass);
  report_sweep(out, rec);
  out << "exponent: " << (rep.pass ? "PASS " : "FAIL ") << rep.message << "\n";
  return 0;
}

int cmd_model(const RunConfig& cfg, std::ostream& out) {
  Block t(cfg.task, "task");
  const SolverOptions so = solver_options(t, cfg);
  ThetaOptions to = theta_options(t, so);
  const GammaOptions go = gamma_options(t);
  std::vector<std::string> bcs{"dirichlet", "neumann", "dtn"};
  if (t.has("bcs")) {
    bcs.clear();
    const json& v = t.raw("bcs");
    if (!v.is_array()) throw ConfigError("task.bcs: expected an array of strings");
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError("task.bcs: expected an array of strings");
      bcs.push_back(e.get<std::string>());
    }
  }
  t.finish();
  to.dirichlet = to.neumann = to.dtn = false;
  for (const auto& s : bcs) {
    switch (bc_of("task.bcs", s)) {
      case BoundaryCondition::dirichlet: to.dirichlet = true; break;
      case BoundaryCondition::neumann: to.neumann = true; break;
      case BoundaryCondition::dtn: to.dtn = true; break;
      default: throw ConfigError("task.bcs: model problems take dirichlet, neumann or dtn");
    }
  }
  const DomainSpec& dom = need_domain(cfg);
  const GammaReport g = classify_gamma(cfg.field, dom, go);
  const ThetaCoefficients th = theta_coefficients(cfg.field, dom, g, to);

  const Output o(cfg.out_dir);
  auto m = o.open("model.csv");
  write_model_csv(m, th.evaluations);
  auto tc = o.open("theta.csv");
  tc << "coefficient,value,argmin,branch\n";
  auto line = [&](const char* name, bool has, double v, const Point& arg, const std::string& br) {
    if (!has) return;
    tc << name << "," << g17(v) << "," << coords(arg) << "," << br << "\n";
    out << name << " = " << v << " at " << pretty(arg) << " (" << br << ")\n";
  };
  line("theta_d", th.has_d, th.theta_d, th.argmin_d, th.branch_d);
  line("theta_n", th.has_n, th.theta_n, th.argmin_n, th.branch_n);
  line("theta_dn", th.has_dn, th.theta_dn, th.argmin_dn, th.branch_dn);
  out << th.evaluations.size() << " model evaluations -> " << o.path("model.csv") << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Block t(cfg.task, "task");
  SweepSetup s = sweep_setup(t, cfg);
  const GammaOptions go = gamma_options(t);
  const double etol = t.number("exponent_tolerance", -1.0);
  const bool first = t.boolean("first_term", false);
  const double ptol = t.number("prefactor_tolerance", -1.0);
  ThetaOptions to = theta_options(t, s.plan.solver);
  t.finish();
  finish_setup(s, cfg, go);

  const auto rec = run_sweep(s.plan);
  const auto lead = verify_leading_order(s.plan, rec, s.plan.kappa, etol);
  const Output o(cfg.out_dir);
  auto sw = o.open("sweep.csv");
  write_sweep_csv(sw, rec);
  report_sweep(out, rec);

  struct Check {
    std::string name;
    double measured, target, tolerance;
    bool pass;
    std::string message;
  };
  std::vector<Check> checks{{"exponent", lead.fit.exponent, lead.target, lead.tolerance, lead.pass, lead.message}};
  double target_prefactor = std::nan("");
  if (first) {
    to.dirichlet = s.plan.bc == BoundaryCondition::dirichlet;
    to.neumann = s.plan.bc == BoundaryCondition::neumann;
    to.dtn = s.plan.bc == BoundaryCondition::dtn;
    const ThetaCoefficients th = theta_coefficients(cfg.field, s.plan.domain, s.gamma, to);
    auto mc = o.open("model.csv");
    write_model_csv(mc, th.evaluations);
    const auto ft = verify_first_term(s.plan, rec, th, s.plan.kappa, ptol);
    target_prefactor = ft.theta;
    checks.push_back({"prefactor", ft.theta_hat, ft.theta, ft.tolerance, ft.pass, ft.message});
    std::string rem;
    for (double r : ft.remainder_ratio) rem += " " + g17(r).substr(0, 10);
    out << "remainder (lambda - theta beta^p) beta^-" << ft.remainder_exponent << ":" << rem << " (not gated)\n";
  }
  auto fit = o.open("fit.csv");
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  write_fit_csv(fit, lead, target_prefactor, all);
  auto vc = o.open("verify.csv");
  vc << "check,measured,target,tolerance,pass\n";
  for (const auto& c : checks) {
    vc << c.name << "," << g17(c.measured) << "," << g17(c.target) << "," << g17(c.tolerance) << "," << (c.pass ? 1 : 0)
       << "\n";
    out << c.name << ": " << (c.pass ? "PASS " : "FAIL ") << c.message << "\n";
  }
  for (const auto& c : checks)
    if (!c.pass) {
      err << "verify failed: " << c.name << "\n";
      return 1;
    }
  return 0;
}

}  // namespace

Polynomial parse_polynomial(const std::string& text, std::size_t dim) { return PolyParser(text, dim).parse(); }

RunConfig parse_config(const std::string& text, const std::string& command) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
  }
  Block top(doc, "config");
  const std::string schema = top.string("schema");
  if (schema != kSchema) throw ConfigError("config.schema: expected \"" + std::string(kSchema) + "\"");
  RunConfig cfg;
  cfg.command = command;
  cfg.field = parse_field(top.raw("field"));
  if (top.has("domain")) cfg.domain = parse_domain(doc.at("domain"));
  if (cfg.domain && cfg.domain->dim() != cfg.field.dim())
    throw ConfigError("domain: dimension differs from field.dim");
  if (top.has("task")) {
    cfg.task = doc.at("task");
    if (!cfg.task.is_object()) throw ConfigError("config.task: expected an object");
  }
  cfg.out_dir = top.string("output", std::string("."));
  if (top.has("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_string()) throw ConfigError("config.seed: expected a hexadecimal string");
    cfg.seed = parse_seed(s.get<std::string>());
  }
  const long threads = top.integer("threads", 1);
  if (threads < 1) throw ConfigError("config.threads: must be >= 1");
  cfg.threads = static_cast<std::size_t>(threads);
  top.finish();
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"magnetic Laplacian ground states and asymptotics"};
  app.require_subcommand(1);
  std::string config, out_dir, seed;
  std::size_t threads = 0;
  std::string command;
  for (const char* name : {"analyze", "solve", "sweep", "model", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "parallel width for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "solver seed, hexadecimal");
    sub->callback([&command, name] { command = name; });
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  RunConfig cfg;
  try {
    std::ifstream f(config, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file " + config);
    std::stringstream ss;
    ss << f.rdbuf();
    cfg = parse_config(ss.str(), command);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!seed.empty()) cfg.seed = parse_seed(seed);
    if (threads > 0) cfg.threads = threads;
    if (command != "analyze" && !cfg.domain) throw ConfigError("domain: required block missing");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (command == "analyze") return cmd_analyze(cfg, out);
    if (command == "solve") return cmd_solve(cfg, out);
    if (command == "sweep") return cmd_sweep(cfg, out);
    if (command == "model") return cmd_model(cfg, out);
    return cmd_verify(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace maglap::cli
