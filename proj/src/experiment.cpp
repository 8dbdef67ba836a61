// SPDX-License-Identifier: Apache-2.0

#include "nlevp/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace nlevp
{

namespace
{

using Clock = std::chrono::steady_clock;

[[noreturn]] void config_error(const std::string &message)
{
  throw Error(ErrorCode::ConfigError, message);
}

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
  {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct Entry
{
  std::string value;
  std::size_t line = 0;
};

std::string where(const std::string &key, const Entry &e)
{
  return "line " + std::to_string(e.line) + ": " + key;
}

double parse_real(const std::string &key, const Entry &e, const std::string &text)
{
  const std::string t = trim(text);
  char *end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(x))
  {
    config_error(where(key, e) + ": expected a finite number, got '" + t + "'");
  }
  return x;
}

std::uint64_t parse_count(const std::string &key, const Entry &e)
{
  const std::string t = trim(e.value);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(c); }))
  {
    config_error(where(key, e) + ": expected a nonnegative integer, got '" + t + "'");
  }
  try
  {
    return std::stoull(t);
  }
  catch (const std::exception &)
  {
    config_error(where(key, e) + ": integer out of range");
  }
}

std::vector<double> parse_list(const std::string &key, const Entry &e, const std::string &text)
{
  std::vector<double> out;
  std::istringstream in(text);
  std::string token;
  while (in >> token)
  {
    out.push_back(parse_real(key, e, token));
  }
  return out;
}

std::vector<std::vector<double>> parse_rows(const std::string &key, const Entry &e)
{
  std::vector<std::vector<double>> rows;
  std::string row;
  std::istringstream in(e.value);
  while (std::getline(in, row, ';'))
  {
    rows.push_back(parse_list(key, e, row));
  }
  if (rows.empty() || rows.front().empty())
  {
    config_error(where(key, e) + ": empty matrix");
  }
  for (const auto &r : rows)
  {
    if (r.size() != rows.size())
    {
      config_error(where(key, e) + ": matrix must be square with rows separated by ';'");
    }
  }
  return rows;
}

template <typename T>
T parse_choice(const std::string &key, const Entry &e,
               std::initializer_list<std::pair<const char *, T>> choices)
{
  std::string allowed;
  for (const auto &[name, value] : choices)
  {
    if (e.value == name)
    {
      return value;
    }
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  config_error(where(key, e) + ": unknown value '" + e.value + "' (expected " + allowed + ")");
}

const char *mode_name(Mode m)
{
  switch (m)
  {
    case Mode::Solve:
      return "solve";
    case Mode::Sweep:
      return "sweep";
    case Mode::Oracle:
      return "oracle";
  }
  return "solve";
}

const char *method_name(Method m)
{
  return m == Method::CauchyRational ? "cauchy" : "chebyshev";
}

const char *rule_name(QuadratureRule r)
{
  return r == QuadratureRule::Trapezoid ? "trapezoid" : "gauss-legendre";
}

const char *pipeline_name(Pipeline p)
{
  return p == Pipeline::Reduced ? "reduced" : "arnoldi";
}

const std::vector<std::string> &matrix_names()
{
  static const std::vector<std::string> names{"A0", "A1", "M2", "C1", "K0"};
  return names;
}

std::optional<DenseMatrix> &matrix_slot(ProblemSpec &p, const std::string &name)
{
  if (name == "A0")
  {
    return p.a0;
  }
  if (name == "A1")
  {
    return p.a1;
  }
  if (name == "M2")
  {
    return p.m2;
  }
  if (name == "C1")
  {
    return p.c1;
  }
  return p.k0;
}

const std::optional<DenseMatrix> &matrix_slot(const ProblemSpec &p, const std::string &name)
{
  return matrix_slot(const_cast<ProblemSpec &>(p), name);
}

// Removes key from the map and returns its entry, if present.
std::optional<std::pair<std::string, Entry>> take(std::map<std::string, Entry> &entries,
                                                   const std::string &key)
{
  const auto it = entries.find(key);
  if (it == entries.end())
  {
    return std::nullopt;
  }
  auto out = std::make_pair(it->first, it->second);
  entries.erase(it);
  return out;
}

std::optional<DenseMatrix> take_matrix(std::map<std::string, Entry> &entries,
                                       const std::string &name)
{
  const auto re = take(entries, "problem." + name + ".re");
  const auto im = take(entries, "problem." + name + ".im");
  if (!re && !im)
  {
    return std::nullopt;
  }
  if (!re)
  {
    config_error(where(im->first, im->second) + ": missing companion problem." + name + ".re");
  }
  const auto rows = parse_rows(re->first, re->second);
  const auto n = static_cast<Index>(rows.size());
  DenseMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
  {
    for (Index j = 0; j < n; ++j)
    {
      a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  if (im)
  {
    const auto irows = parse_rows(im->first, im->second);
    if (irows.size() != rows.size())
    {
      config_error(where(im->first, im->second) + ": size differs from the real part");
    }
    for (Index i = 0; i < n; ++i)
    {
      for (Index j = 0; j < n; ++j)
      {
        a(i, j) += Complex(0.0, irows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      }
    }
  }
  return a;
}

Complex take_complex(std::map<std::string, Entry> &entries, const std::string &base,
                     bool &present)
{
  const auto re = take(entries, base + ".re");
  const auto im = take(entries, base + ".im");
  present = re.has_value() || im.has_value();
  const double x = re ? parse_real(re->first, re->second, re->second.value) : 0.0;
  const double y = im ? parse_real(im->first, im->second, im->second.value) : 0.0;
  return {x, y};
}

std::optional<Contour> take_domain(std::map<std::string, Entry> &entries)
{
  const auto kind = take(entries, "domain.kind");
  bool has_center = false;
  const Complex center = take_complex(entries, "domain.center", has_center);
  std::map<std::string, std::pair<double, Entry>> values;
  for (const char *name : {"radius", "rx", "ry", "a", "b"})
  {
    if (const auto e = take(entries, std::string("domain.") + name))
    {
      values[name] = {parse_real(e->first, e->second, e->second.value), e->second};
    }
  }
  if (!kind)
  {
    if (has_center || !values.empty())
    {
      config_error("domain.kind is required when other domain.* keys are given");
    }
    return std::nullopt;
  }
  const std::string k = kind->second.value;
  auto require = [&](const char *name) {
    const auto it = values.find(name);
    if (it == values.end())
    {
      config_error(where(kind->first, kind->second) + ": domain." + name + " is required for " + k);
    }
    const double x = it->second.first;
    values.erase(it);
    return x;
  };
  Contour domain;
  if (k == "circle")
  {
    domain = Circle{center, require("radius")};
  }
  else if (k == "ellipse")
  {
    const double rx = require("rx");
    domain = Ellipse{center, rx, require("ry")};
  }
  else if (k == "interval")
  {
    if (has_center)
    {
      config_error("domain.center does not apply to an interval");
    }
    const double a = require("a");
    domain = Interval{a, require("b")};
  }
  else
  {
    config_error(where(kind->first, kind->second) + ": unknown domain kind '" + k +
                 "' (expected circle, ellipse, interval)");
  }
  if (!values.empty())
  {
    const auto &[name, value] = *values.begin();
    config_error(where("domain." + name, value.second) + ": does not apply to " + k);
  }
  try
  {
    validate(domain);
  }
  catch (const Error &e)
  {
    config_error(std::string("invalid domain: ") + e.what());
  }
  return domain;
}

}  // namespace

void validate_config(const ExperimentConfig &cfg)
{
  const ProblemSpec &p = cfg.problem;
  if (p.name != "diag" && p.name != "quadratic" && p.name != "delay")
  {
    config_error("problem.name: unknown gallery problem '" + p.name +
                 "' (expected diag, quadratic, delay)");
  }
  if (p.n < 1)
  {
    config_error("problem.n must be >= 1");
  }
  const bool explicit_matrices = p.a0 || p.a1 || p.m2 || p.c1 || p.k0;
  if (p.name != "diag" && !explicit_matrices && (p.inside < 0 || p.inside > p.n))
  {
    config_error("problem.inside must lie in [0, problem.n]");
  }
  if (!(p.tau > 0.0))
  {
    config_error("problem.tau must be positive");
  }
  for (const auto &name : matrix_names())
  {
    const auto &slot = matrix_slot(p, name);
    if (slot && slot->rows() != p.n)
    {
      config_error("problem." + name + " must be problem.n x problem.n");
    }
  }
  const bool has_delay = p.a0 || p.a1;
  const bool has_quadratic = p.m2 || p.c1 || p.k0;
  if (p.name == "diag")
  {
    if (has_delay || has_quadratic)
    {
      config_error("problem matrices do not apply to the diag problem");
    }
    if (static_cast<Index>(p.roots.size()) > p.n)
    {
      config_error("problem.roots: more roots than problem.n");
    }
  }
  else if (!p.roots.empty())
  {
    config_error("problem.roots only applies to the diag problem");
  }
  if (p.name == "quadratic")
  {
    if (has_delay)
    {
      config_error("problem.A0/A1 do not apply to the quadratic problem");
    }
    if (has_quadratic && !(p.m2 && p.c1 && p.k0))
    {
      config_error("the quadratic problem needs all of problem.M2, problem.C1, problem.K0");
    }
  }
  if (p.name == "delay")
  {
    if (has_quadratic)
    {
      config_error("problem.M2/C1/K0 do not apply to the delay problem");
    }
    if (has_delay && !(p.a0 && p.a1))
    {
      config_error("the delay problem needs both problem.A0 and problem.A1");
    }
    if (has_delay && !cfg.domain)
    {
      config_error("an explicit delay problem needs a domain.kind");
    }
  }

  try
  {
    cfg.solver.validate();
  }
  catch (const Error &e)
  {
    config_error(e.what());
  }
  if (cfg.domain)
  {
    const bool interval = std::holds_alternative<Interval>(*cfg.domain);
    if (cfg.solver.method == Method::ChebyshevInterp && !interval)
    {
      config_error("solver.method = chebyshev needs domain.kind = interval");
    }
    if (cfg.solver.method == Method::CauchyRational && interval && cfg.mode != Mode::Sweep)
    {
      config_error("solver.method = cauchy needs a circle or ellipse domain");
    }
  }
  else if (cfg.solver.method == Method::ChebyshevInterp)
  {
    config_error("solver.method = chebyshev needs domain.kind = interval");
  }
  if (cfg.mode == Mode::Sweep)
  {
    if (cfg.sweep_m.empty())
    {
      config_error("sweep mode needs sweep.m");
    }
    for (std::size_t i = 0; i < cfg.sweep_m.size(); ++i)
    {
      if (cfg.sweep_m[i] < 2 || (i > 0 && cfg.sweep_m[i] <= cfg.sweep_m[i - 1]))
      {
        config_error("sweep.m must be strictly increasing orders >= 2");
      }
    }
  }
  if (!(cfg.sweep_grid_scale > 0.0 && cfg.sweep_grid_scale <= 1.0))
  {
    config_error("sweep.grid_scale must lie in (0, 1]");
  }
  if (cfg.oracle_grid < 2)
  {
    config_error("oracle.grid must be >= 2");
  }
}

std::string format_real(double x)
{
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

ExperimentConfig parse_config(std::string_view text)
{
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line))
  {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty())
    {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
    {
      config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty())
    {
      config_error("line " + std::to_string(line_no) + ": empty key");
    }
    if (entries.contains(key))
    {
      config_error("line " + std::to_string(line_no) + ": duplicate key " + key);
    }
    entries[key] = {value, line_no};
  }

  ExperimentConfig cfg;
  ProblemSpec &p = cfg.problem;
  SolverConfig &s = cfg.solver;

  if (const auto e = take(entries, "mode"))
  {
    cfg.mode = parse_choice<Mode>(e->first, e->second,
                                  {{"solve", Mode::Solve}, {"sweep", Mode::Sweep}, {"oracle", Mode::Oracle}});
  }
  if (const auto e = take(entries, "problem.name"))
  {
    p.name = e->second.value;
  }
  bool explicit_n = false;
  if (const auto e = take(entries, "problem.n"))
  {
    p.n = static_cast<Index>(parse_count(e->first, e->second));
    explicit_n = true;
  }
  if (const auto e = take(entries, "problem.inside"))
  {
    p.inside = static_cast<Index>(parse_count(e->first, e->second));
  }
  if (const auto e = take(entries, "problem.seed"))
  {
    p.seed = parse_count(e->first, e->second);
  }
  if (const auto e = take(entries, "problem.tau"))
  {
    p.tau = parse_real(e->first, e->second, e->second.value);
  }
  {
    const auto re = take(entries, "problem.roots.re");
    const auto im = take(entries, "problem.roots.im");
    if (im && !re)
    {
      config_error(where(im->first, im->second) + ": missing problem.roots.re");
    }
    if (re)
    {
      const auto x = parse_list(re->first, re->second, re->second.value);
      std::vector<double> y(x.size(), 0.0);
      if (im)
      {
        y = parse_list(im->first, im->second, im->second.value);
        if (y.size() != x.size())
        {
          config_error(where(im->first, im->second) + ": length differs from problem.roots.re");
        }
      }
      for (std::size_t i = 0; i < x.size(); ++i)
      {
        p.roots.emplace_back(x[i], y[i]);
      }
    }
  }
  for (const auto &name : matrix_names())
  {
    matrix_slot(p, name) = take_matrix(entries, name);
  }
  if (!explicit_n)
  {
    for (const auto &name : matrix_names())
    {
      if (const auto &slot = matrix_slot(p, name))
      {
        p.n = slot->rows();
        break;
      }
    }
  }

  cfg.domain = take_domain(entries);

  if (const auto e = take(entries, "solver.method"))
  {
    s.method = parse_choice<Method>(e->first, e->second,
                                    {{"cauchy", Method::CauchyRational},
                                     {"chebyshev", Method::ChebyshevInterp}});
  }
  if (const auto e = take(entries, "solver.pipeline"))
  {
    cfg.pipeline = parse_choice<Pipeline>(e->first, e->second,
                                          {{"reduced", Pipeline::Reduced}, {"arnoldi", Pipeline::Arnoldi}});
  }
  if (const auto e = take(entries, "solver.quadrature"))
  {
    s.quadrature = parse_choice<QuadratureRule>(
        e->first, e->second,
        {{"trapezoid", QuadratureRule::Trapezoid}, {"gauss-legendre", QuadratureRule::GaussLegendre}});
  }
  const std::pair<const char *, std::size_t *> counts[] = {
      {"solver.m", &s.m},           {"solver.nu", &s.subspace_dim},
      {"solver.q", &s.power_steps}, {"solver.k", &s.k},
      {"solver.max_outer", &s.max_outer}, {"solver.krylov_max", &s.krylov_max},
      {"oracle.grid", &cfg.oracle_grid}};
  for (const auto &[key, slot] : counts)
  {
    if (const auto e = take(entries, key))
    {
      *slot = static_cast<std::size_t>(parse_count(e->first, e->second));
    }
  }
  if (const auto e = take(entries, "solver.tol"))
  {
    s.tol = parse_real(e->first, e->second, e->second.value);
  }
  if (const auto e = take(entries, "solver.seed"))
  {
    s.seed = parse_count(e->first, e->second);
  }
  bool has_shift = false;
  const Complex shift = take_complex(entries, "solver.shift", has_shift);
  if (has_shift)
  {
    s.shift = shift;
  }
  if (const auto e = take(entries, "sweep.m"))
  {
    std::istringstream list(e->second.value);
    std::string token;
    while (list >> token)
    {
      cfg.sweep_m.push_back(static_cast<std::size_t>(parse_count(e->first, Entry{token, e->second.line})));
    }
  }
  if (const auto e = take(entries, "sweep.grid_scale"))
  {
    cfg.sweep_grid_scale = parse_real(e->first, e->second, e->second.value);
  }
  if (const auto e = take(entries, "output.report"))
  {
    cfg.report_path = e->second.value;
  }

  if (!entries.empty())
  {
    const auto &[key, entry] = *std::min_element(
        entries.begin(), entries.end(),
        [](const auto &a, const auto &b) { return a.second.line < b.second.line; });
    config_error(where(key, entry) + ": unknown key");
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    config_error("cannot read config file " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string echo_config(const ExperimentConfig &cfg, std::string_view prefix)
{
  std::ostringstream out;
  auto line = [&](const std::string &key, const std::string &value) {
    out << prefix << key << " = " << value << '\n';
  };
  auto list = [](const auto &values, auto &&fmt) {
    std::string s;
    for (const auto &v : values)
    {
      s += (s.empty() ? "" : " ") + fmt(v);
    }
    return s;
  };
  auto matrix = [](const DenseMatrix &a, bool imag) {
    std::string s;
    for (Index i = 0; i < a.rows(); ++i)
    {
      s += i == 0 ? "" : "; ";
      for (Index j = 0; j < a.cols(); ++j)
      {
        s += (j == 0 ? "" : " ") + format_real(imag ? a(i, j).imag() : a(i, j).real());
      }
    }
    return s;
  };
  const ProblemSpec &p = cfg.problem;
  const SolverConfig &s = cfg.solver;
  line("mode", mode_name(cfg.mode));
  line("problem.name", p.name);
  line("problem.n", std::to_string(p.n));
  line("problem.inside", std::to_string(p.inside));
  line("problem.seed", std::to_string(p.seed));
  line("problem.tau", format_real(p.tau));
  if (!p.roots.empty())
  {
    line("problem.roots.re", list(p.roots, [](Complex z) { return format_real(z.real()); }));
    line("problem.roots.im", list(p.roots, [](Complex z) { return format_real(z.imag()); }));
  }
  for (const auto &name : matrix_names())
  {
    if (const auto &slot = matrix_slot(p, name))
    {
      line("problem." + name + ".re", matrix(*slot, false));
      line("problem." + name + ".im", matrix(*slot, true));
    }
  }
  if (cfg.domain)
  {
    if (const auto *c = std::get_if<Circle>(&*cfg.domain))
    {
      line("domain.kind", "circle");
      line("domain.center.re", format_real(c->center.real()));
      line("domain.center.im", format_real(c->center.imag()));
      line("domain.radius", format_real(c->radius));
    }
    else if (const auto *e = std::get_if<Ellipse>(&*cfg.domain))
    {
      line("domain.kind", "ellipse");
      line("domain.center.re", format_real(e->center.real()));
      line("domain.center.im", format_real(e->center.imag()));
      line("domain.rx", format_real(e->rx));
      line("domain.ry", format_real(e->ry));
    }
    else
    {
      const auto &iv = std::get<Interval>(*cfg.domain);
      line("domain.kind", "interval");
      line("domain.a", format_real(iv.a));
      line("domain.b", format_real(iv.b));
    }
  }
  line("solver.method", method_name(s.method));
  line("solver.pipeline", pipeline_name(cfg.pipeline));
  line("solver.quadrature", rule_name(s.quadrature));
  line("solver.m", std::to_string(s.m));
  line("solver.nu", std::to_string(s.subspace_dim));
  line("solver.q", std::to_string(s.power_steps));
  line("solver.k", std::to_string(s.k));
  line("solver.tol", format_real(s.tol));
  line("solver.max_outer", std::to_string(s.max_outer));
  line("solver.krylov_max", std::to_string(s.krylov_max));
  line("solver.seed", std::to_string(s.seed));
  if (s.shift)
  {
    line("solver.shift.re", format_real(s.shift->real()));
    line("solver.shift.im", format_real(s.shift->imag()));
  }
  if (!cfg.sweep_m.empty())
  {
    line("sweep.m", list(cfg.sweep_m, [](std::size_t m) { return std::to_string(m); }));
  }
  line("sweep.grid_scale", format_real(cfg.sweep_grid_scale));
  line("oracle.grid", std::to_string(cfg.oracle_grid));
  if (!cfg.report_path.empty())
  {
    line("output.report", cfg.report_path);
  }
  return out.str();
}

ExperimentConfig config_from_report(std::string_view report)
{
  std::istringstream in{std::string(report)};
  std::string line;
  std::string text;
  constexpr std::string_view prefix = "config.";
  while (std::getline(in, line))
  {
    if (line.starts_with(prefix))
    {
      text += line.substr(prefix.size()) + '\n';
    }
  }
  return parse_config(text);
}

Instance instantiate(const ExperimentConfig &cfg)
{
  const ProblemSpec &p = cfg.problem;
  GalleryProblem g;
  if (p.name == "diag")
  {
    g = make_diagonal(p.roots, p.n);
    g.domain = Circle{0.0, 1.0};
  }
  else if (p.name == "quadratic")
  {
    if (p.m2)
    {
      g = make_quadratic(*p.m2, *p.c1, *p.k0);
      g.domain = Circle{0.0, 1.0};
    }
    else
    {
      g = standard_quadratic(p.n, p.inside, p.seed);
    }
  }
  else if (p.name == "delay")
  {
    g = p.a0 ? make_delay(*p.a0, *p.a1, p.tau) : standard_delay(p.n, p.inside, p.seed, false);
  }
  else
  {
    config_error("problem.name: unknown gallery problem '" + p.name + "'");
  }
  Contour domain = cfg.domain ? *cfg.domain : *g.domain;
  return {std::move(g), domain};
}

namespace
{

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct SolveRun
{
  Instance instance;
  EigenResult result;
  bool converged = true;
  double problem_seconds = 0.0;
  double solve_seconds = 0.0;
};

SolveRun solve_instance(const ExperimentConfig &cfg)
{
  SolveRun run;
  auto start = Clock::now();
  run.instance = instantiate(cfg);
  run.problem_seconds = seconds_since(start);
  start = Clock::now();
  const auto &problem = run.instance.gallery.problem;
  try
  {
    run.result = cfg.pipeline == Pipeline::Reduced
                     ? reduced_subspace_iteration(problem, cfg.solver, run.instance.domain)
                     : full_pencil_arnoldi(problem, cfg.solver, run.instance.domain);
  }
  catch (const NotConverged &e)
  {
    run.result = e.result();
    run.converged = false;
  }
  run.solve_seconds = seconds_since(start);
  return run;
}

void write_pairs(std::ostringstream &out, const std::string &base,
                 const std::vector<EigenPair> &pairs)
{
  out << base << ".count = " << pairs.size() << '\n';
  for (std::size_t i = 0; i < pairs.size(); ++i)
  {
    const std::string key = base + "." + std::to_string(i);
    out << key << ".re = " << format_real(pairs[i].lambda.real()) << '\n';
    out << key << ".im = " << format_real(pairs[i].lambda.imag()) << '\n';
    out << key << ".residual = " << format_real(pairs[i].residual) << '\n';
  }
}

std::string result_block(const SolveRun &run)
{
  std::ostringstream out;
  const EigenResult &r = run.result;
  out << "result.status = " << (run.converged ? "converged" : "not_converged") << '\n';
  out << "result.outer_iterations = " << r.outer_iterations << '\n';
  out << "result.shift.re = " << format_real(r.shift.real()) << '\n';
  out << "result.shift.im = " << format_real(r.shift.imag()) << '\n';
  write_pairs(out, "result.eigenvalue", r.pairs);
  write_pairs(out, "result.rejected", r.rejected);
  out << "result.history.count = " << r.history.size() << '\n';
  for (std::size_t i = 0; i < r.history.size(); ++i)
  {
    out << "result.history." << i << " = " << format_real(r.history[i]) << '\n';
  }
  return out.str();
}

std::string summary_block(const SolveRun &run)
{
  std::ostringstream out;
  const EigenResult &r = run.result;
  out << (run.converged ? "converged" : "NOT converged") << ": " << r.pairs.size()
      << " eigenvalue(s), " << r.outer_iterations << " outer iteration(s)";
  if (!r.rejected.empty())
  {
    out << ", " << r.rejected.size() << " rejected";
  }
  out << '\n';
  for (const auto &pair : r.pairs)
  {
    char buffer[128];
    std::snprintf(buffer, sizeof buffer, "  %+.15e %+.15ei   residual %.3e\n",
                  pair.lambda.real(), pair.lambda.imag(), pair.residual);
    out << buffer;
  }
  return out.str();
}

std::string header()
{
  return "# nlevp report\n";
}

}  // namespace

RunOutcome run_solve(const ExperimentConfig &cfg, const RunOptions &options)
{
  const SolveRun run = solve_instance(cfg);
  RunOutcome outcome;
  outcome.report = header() + echo_config(cfg) + result_block(run);
  if (options.timings)
  {
    outcome.report += "timing.problem_s = " + format_real(run.problem_seconds) + '\n';
    outcome.report += "timing.solve_s = " + format_real(run.solve_seconds) + '\n';
  }
  outcome.summary = summary_block(run);
  outcome.exit_code = run.converged ? 0 : 2;
  return outcome;
}

RunOutcome run_oracle(const ExperimentConfig &cfg, const RunOptions &options)
{
  const SolveRun run = solve_instance(cfg);
  const auto start = Clock::now();
  const GalleryProblem &g = run.instance.gallery;
  const Contour &domain = run.instance.domain;
  std::vector<Complex> oracle;
  std::vector<std::string> warnings;
  if (g.reference && g.oracle != OracleKind::NewtonTrace)
  {
    for (const Complex z : *g.reference)
    {
      if (contains(domain, z))
      {
        oracle.push_back(z);
      }
    }
  }
  else
  {
    OracleResult r = newton_trace_oracle(g.problem, domain, cfg.oracle_grid);
    oracle = std::move(r.roots);
    warnings = std::move(r.warnings);
  }
  const double oracle_seconds = seconds_since(start);

  double deviation = 0.0;
  for (const auto &pair : run.result.pairs)
  {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Complex z : oracle)
    {
      nearest = std::min(nearest, std::abs(pair.lambda - z));
    }
    deviation = std::max(deviation, nearest);
  }

  std::ostringstream out;
  out << "oracle.kind = "
      << (g.oracle == OracleKind::ClosedForm     ? "closed-form"
          : g.oracle == OracleKind::CompanionEig ? "companion"
                                                 : "newton-trace")
      << '\n';
  out << "oracle.count = " << oracle.size() << '\n';
  for (std::size_t i = 0; i < oracle.size(); ++i)
  {
    out << "oracle.eigenvalue." << i << ".re = " << format_real(oracle[i].real()) << '\n';
    out << "oracle.eigenvalue." << i << ".im = " << format_real(oracle[i].imag()) << '\n';
  }
  out << "oracle.max_deviation = " << format_real(deviation) << '\n';
  out << "oracle.warnings = " << warnings.size() << '\n';

  RunOutcome outcome;
  outcome.report = header() + echo_config(cfg) + result_block(run) + out.str();
  if (options.timings)
  {
    outcome.report += "timing.problem_s = " + format_real(run.problem_seconds) + '\n';
    outcome.report += "timing.solve_s = " + format_real(run.solve_seconds) + '\n';
    outcome.report += "timing.oracle_s = " + format_real(oracle_seconds) + '\n';
  }
  char buffer[96];
  std::snprintf(buffer, sizeof buffer, "oracle: %zu eigenvalue(s), max deviation %.3e\n",
                oracle.size(), deviation);
  outcome.summary = summary_block(run) + buffer;
  for (const auto &w : warnings)
  {
    outcome.summary += "warning: " + w + '\n';
  }
  outcome.exit_code = run.converged ? 0 : 2;
  return outcome;
}

RunOutcome run_sweep(const ExperimentConfig &cfg, const RunOptions &options)
{
  const auto start = Clock::now();
  const Instance inst = instantiate(cfg);
  const auto &problem = inst.gallery.problem;
  const Contour &domain = inst.domain;
  const auto grid = default_test_grid(domain, cfg.sweep_grid_scale);

  // Rational approximants need a closed curve; Chebyshev uses the interval itself or the
  // real diameter of a curve with a real center.
  std::optional<Contour> curve;
  std::optional<Interval> segment;
  if (const auto *iv = std::get_if<Interval>(&domain))
  {
    segment = *iv;
  }
  else
  {
    curve = domain;
    const Complex c = center_of(domain);
    if (c.imag() == 0.0)
    {
      const double r = std::holds_alternative<Circle>(domain) ? std::get<Circle>(domain).radius
                                                             : std::get<Ellipse>(domain).rx;
      segment = Interval{c.real() - r, c.real() + r};
    }
  }

  const std::size_t count = cfg.sweep_m.size();
  std::vector<double> cauchy(count, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> cheb(count, std::numeric_limits<double>::quiet_NaN());
  std::optional<double> ratio_cauchy;
  std::optional<double> ratio_cheb;
  auto fill = [&](const Contour &region, std::vector<double> &errors,
                  std::optional<double> &ratio) {
    if (count >= 3)
    {
      const DecayReport r = decay_check(problem, region, cfg.sweep_m, grid, cfg.solver.quadrature);
      for (std::size_t i = 0; i < count; ++i)
      {
        errors[i] = r.points[i].error;
      }
      ratio = r.ratio;
      return;
    }
    for (std::size_t i = 0; i < count; ++i)
    {
      const Approximant a =
          std::holds_alternative<Interval>(region)
              ? Approximant(build_chebyshev(problem, std::get<Interval>(region), cfg.sweep_m[i]))
              : Approximant(build_rational(problem, make_quadrature(cfg.solver.quadrature, region,
                                                                    cfg.sweep_m[i])));
      errors[i] = sup_error(a, problem, grid);
    }
  };
  if (curve)
  {
    fill(*curve, cauchy, ratio_cauchy);
  }
  if (segment)
  {
    fill(*segment, cheb, ratio_cheb);
  }

  std::ostringstream csv;
  csv << "m,error_cauchy,error_chebyshev\n";
  for (std::size_t i = 0; i < count; ++i)
  {
    csv << cfg.sweep_m[i] << ',' << format_real(cauchy[i]) << ',' << format_real(cheb[i]) << '\n';
  }
  RunOutcome outcome;
  outcome.report = csv.str();
  auto ratio_line = [](const char *name, const std::optional<double> &r) {
    return std::string(name) + " = " + (r ? format_real(*r) : std::string("n/a")) + '\n';
  };
  outcome.summary = ratio_line("ratio_cauchy", ratio_cauchy) + ratio_line("ratio_chebyshev", ratio_cheb);
  if (options.timings)
  {
    outcome.summary += "timing.sweep_s = " + format_real(seconds_since(start)) + '\n';
  }
  return outcome;
}

RunOutcome run_experiment(const ExperimentConfig &cfg, const RunOptions &options)
{
  switch (cfg.mode)
  {
    case Mode::Solve:
      return run_solve(cfg, options);
    case Mode::Sweep:
      return run_sweep(cfg, options);
    case Mode::Oracle:
      return run_oracle(cfg, options);
  }
  return run_solve(cfg, options);
}

}  // namespace nlevp
