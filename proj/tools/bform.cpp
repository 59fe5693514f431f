// bform: command-line front end for the binary-form library.
//
// Exit codes: 0 ok, 1 search budget exhausted (partial results are still
// printed), 2 bad input, 3 zero form, 4 degenerate input, 5 invariant violation.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "bform/bform.hpp"
#include "bform/io.hpp"

namespace {

using namespace bform;

enum Exit { kOk = 0, kNotFound = 1, kBadInput = 2, kZeroForm = 3, kDegenerate = 4, kViolation = 5 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroForm: return kZeroForm;
    case ErrorCode::DegenerateInput:
    case ErrorCode::CollapsedDirections: return kDegenerate;
    case ErrorCode::BudgetExhausted: return kNotFound;
    default: return kBadInput;
  }
}

struct Globals {
  std::uint64_t seed = 0;
  bool json = true;
  double tol = tol::kGradient;
  int budget = 0;
};

struct FormArgs {
  std::string form;
  int degree = -1;
};

void add_form_options(CLI::App* cmd, FormArgs& args) {
  cmd->add_option("--form,form", args.form, "coefficients '[c0,...,cd]', a JSON form object, or a file holding either")
      ->required();
  cmd->add_option("--degree", args.degree, "degree d of an inline coefficient list");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string num(cplx v) {
  if (v.imag() == 0.0) return num(v.real());
  return num(v.real()) + (v.imag() < 0 ? "-" : "+") + num(std::abs(v.imag())) + "i";
}

std::string line(const ComplexLinear& l) { return "(" + num(l.a) + ", " + num(l.b) + ")"; }

SearchBudget search_budget(const Globals& g, int iters) {
  SearchBudget b;
  b.starts = g.budget;
  b.max_newton_iters = iters;
  b.seed = g.seed;
  return b;
}

void print(const Globals& g, const json& j, const std::string& text) {
  if (g.json)
    std::cout << dump(j) << '\n';
  else
    std::cout << text;
}

// ---------------------------------------------------------------------------

int cmd_eigen(const Globals& g, const FormArgs& a) {
  const auto in = read_form(a.form, a.degree);
  const auto result = in.field == Field::Real ? eigen_pairs(in.real()) : eigen_pairs(in.form);
  json j = to_json(result);
  j["form"] = in.field == Field::Real ? to_json(in.real()) : to_json(in.form);
  std::ostringstream t;
  if (const auto* c = std::get_if<DegenerateCircle>(&result)) {
    t << "f = c (x^2+y^2)^" << c->degree / 2 << ", c = " << num(c->eigenvalue)
      << ": every unit vector is an eigenvector with eigenvalue c\n";
  } else {
    for (const auto& e : std::get<std::vector<CriticalRank1>>(result))
      t << "v = " << line(e.v) << "  lambda = " << num(e.lambda) << "  mult " << e.multiplicity
        << (e.is_real ? "  real" : "") << (e.isotropic ? "  isotropic" : "") << '\n';
  }
  print(g, j, t.str());
  return kOk;
}

std::string describe(const CriticalRankK& p) {
  std::ostringstream t;
  t << (p.boundary ? "boundary " : "rank-" + std::to_string(p.k) + " ") << "dist " << num(p.distance) << "  ";
  for (std::size_t i = 0; i < p.summands.size(); ++i)
    t << (i ? " + " : "") << num(p.summands[i].mu) << " " << line(p.summands[i].l) << "^d";
  if (p.tangent) t << " + " << num(p.tangent->nu) << " " << line(p.tangent->l) << "^(d-1) l^perp";
  t << "  grad " << num(p.grad_residual) << "  cert " << num(p.cert_residual) << (p.is_real ? "  real" : "")
    << "  hits " << p.hits << '\n';
  return t.str();
}

int cmd_critical(const Globals& g, const FormArgs& a, int k, const std::string& field, int iters) {
  const auto in = read_form(a.form, a.degree);
  const Field f = field == "real" ? Field::Real : Field::Complex;
  const auto search = critical_rank_k(in.form, k, f, search_budget(g, iters), g.tol);
  std::ostringstream t;
  for (const auto& p : search.points) t << describe(p);
  t << search.honest_count() << " honest + " << search.boundary_count() << " boundary points from " << search.starts
    << " starts" << (search.budget_exhausted ? " (budget exhausted: the list may be incomplete)" : "") << '\n';
  print(g, to_json(search), t.str());
  if (search.budget_exhausted) {
    std::cerr << "bform: BudgetExhausted: the census may be incomplete; partial results printed\n";
    return kNotFound;
  }
  return kOk;
}

int cmd_best(const Globals& g, const FormArgs& a, int k, int iters) {
  const auto in = read_form(a.form, a.degree);
  if (in.field != Field::Real) throw Error(ErrorCode::InvalidArgument, "the best real approximation needs a real form");
  const auto p = best_rank_k(in.real(), k, search_budget(g, iters));
  print(g, to_json(p), describe(p));
  return kOk;
}

int cmd_counts(const Globals& g, const FormArgs& a, int iters) {
  const auto in = read_form(a.form, a.degree);
  if (in.field != Field::Real) throw Error(ErrorCode::InvalidArgument, "real counts need a real form");
  const auto c = count_real(in.real(), search_budget(g, iters));
  std::ostringstream t;
  t << "real roots " << c.real_roots << ", real critical rank-1 " << c.real_crit1;
  if (c.real_crit2) t << ", real critical rank-2 " << *c.real_crit2 << (c.complete ? "" : " (incomplete census)");
  t << '\n';
  print(g, to_json(c), t.str());
  if (c.real_crit2 && !c.complete) {
    std::cerr << "bform: BudgetExhausted: the rank-2 census may be incomplete\n";
    return kNotFound;
  }
  return kOk;
}

int cmd_spectral(const Globals& g, const FormArgs& a) {
  const auto in = read_form(a.form, a.degree);
  const auto s = in.field == Field::Real ? spectral_decompose(in.real()) : spectral_decompose(in.form);
  std::ostringstream t;
  for (std::size_t i = 0; i < s.eigen.size(); ++i)
    t << num(s.coeffs[i]) << "  * " << line(s.eigen[i].v) << "^d   (lambda " << num(s.eigen[i].lambda) << ")\n";
  t << "residual " << num(s.residual) << ", rank " << s.rank << (s.multiple_roots ? ", D(f) has repeated roots" : "")
    << '\n';
  print(g, to_json(s), t.str());
  return kOk;
}

int cmd_rez(const Globals& g, int d, double phi) {
  const auto r = rez(d, phi);
  std::ostringstream t;
  t << "(x^2+y^2)^" << d / 2 << " = " << num(r.c_d) << " * sum of " << r.summands.size() << " powers, residual "
    << num(r.residual) << '\n';
  for (const auto& l : r.summands) t << "  (" << num(l.a) << ", " << num(l.b) << ")\n";
  print(g, to_json(r), t.str());
  return kOk;
}

int cmd_table(const Globals& g, double seconds, bool exhaustive, int iters) {
  TableOptions opt;
  opt.seed = g.seed;
  if (g.budget > 0) opt.samples = g.budget;
  opt.seconds = seconds;
  opt.exhaustive = exhaustive;
  opt.census.max_newton_iters = iters;
  const auto report = table_search(opt);
  std::ostringstream t;
  t << "#real roots  #real crit1  #real crit2  found\n";
  const auto cell = [](int n) { return n < 0 ? std::string("*") : std::to_string(n); };
  for (const auto& r : report.rows) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%11s  %11s  %11d  ", cell(r.real_roots).c_str(), cell(r.real_crit1).c_str(),
                  r.real_crit2);
    t << buf;
    if (r.found)
      t << "yes (" << r.hits << " samples)";
    else
      t << "not found in " << report.samples << " samples";
    if (!r.listed) t << "  [not in the reference table]";
    t << '\n';
  }
  t << report.samples << " samples, " << report.rejected << " rejected, " << num(report.seconds) << " s"
    << (report.time_limited ? " (time limit)" : "") << '\n';
  print(g, to_json(report), t.str());
  // Wall time stays out of the JSON so that equal seeds give equal output.
  if (g.json) std::cerr << "bform: table search took " << num(report.seconds) << " s\n";
  return kOk;
}

int cmd_root_bound(const Globals& g, int d, int samples) {
  const auto r = root_bound_sweep(d, samples, g.seed);
  std::ostringstream t;
  t << "degree " << d << ", " << r.samples << " samples (" << r.simple << " with simple roots)\n";
  for (const auto& [key, n] : r.histogram) t << "  " << key.first << " real roots, " << key.second << " real eigenvectors: " << n << '\n';
  t << r.violations.size() << " violations\n";
  print(g, to_json(r), t.str());
  if (!r.violations.empty()) {
    for (const auto& v : r.violations) std::cerr << "violation (" << v.reason << "): " << dump(to_json(v.form), -1) << '\n';
    return kViolation;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical rank-k approximations of binary forms"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  bool text = false, json_flag = false;
  app.add_option("--seed", g.seed, "root seed for every random choice");
  app.add_flag("--json", json_flag, "JSON output (default)");
  app.add_flag("--text", text, "human-readable output");
  app.add_option("--tol", g.tol, "gradient and certificate threshold")->check(CLI::PositiveNumber);
  app.add_option("--budget", g.budget, "Newton starts per round (critical, best, counts) or samples (table, maccioni)")
      ->check(CLI::NonNegativeNumber);

  FormArgs form;
  int k = 2, iters = 100, degree = 4, samples = 1000;
  double phi = 0.0, seconds = 600.0;
  std::string field = "complex";
  bool exhaustive = false;

  auto* eigen = app.add_subcommand("eigen", "critical rank-1 tensors (eigenvectors)");
  add_form_options(eigen, form);

  auto* critical = app.add_subcommand("critical", "critical rank-k tensors by multi-start Newton");
  add_form_options(critical, form);
  critical->add_option("-k", k, "rank")->check(CLI::PositiveNumber);
  critical->add_option("--field", field, "real or complex")->check(CLI::IsMember({"real", "complex"}));
  critical->add_option("--iters", iters, "Newton iterations per start")->check(CLI::PositiveNumber);

  auto* best = app.add_subcommand("best", "best real rank-k approximation");
  add_form_options(best, form);
  best->add_option("-k", k, "rank")->check(CLI::PositiveNumber);
  best->add_option("--iters", iters, "Newton iterations per start")->check(CLI::PositiveNumber);

  auto* counts = app.add_subcommand("counts", "real roots and real critical rank-1 / rank-2 counts");
  add_form_options(counts, form);

  auto* spectral = app.add_subcommand("spectral", "decompose f over its critical rank-1 tensors");
  add_form_options(spectral, form);

  auto* rez_cmd = app.add_subcommand("rez", "(x^2+y^2)^(d/2) as a sum of powers over a regular polygon");
  rez_cmd->add_option("-d,--degree", degree, "even degree")->required();
  rez_cmd->add_option("--phi", phi, "rotation of the polygon");

  auto* table = app.add_subcommand("table", "search quartics for each combination of real counts");
  table->add_option("--seconds", seconds, "wall-clock limit")->check(CLI::PositiveNumber);
  table->add_flag("--exhaustive", exhaustive, "keep sampling after every expected row is found");

  auto* sweep = app.add_subcommand("maccioni", "check #real roots <= #real eigenvectors and parity on random forms");
  sweep->add_option("-d,--degree", degree, "degree")->check(CLI::Range(2, 60));
  sweep->add_option("--samples", samples, "number of forms")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }
  g.json = !text || json_flag;

  try {
    if (*eigen) return cmd_eigen(g, form);
    if (*critical) return cmd_critical(g, form, k, field, iters);
    if (*best) return cmd_best(g, form, k, iters);
    if (*counts) return cmd_counts(g, form, iters);
    if (*spectral) return cmd_spectral(g, form);
    if (*rez_cmd) return cmd_rez(g, degree, phi);
    if (*table) return cmd_table(g, seconds, exhaustive, iters);
    if (*sweep) return cmd_root_bound(g, degree, g.budget > 0 ? g.budget : samples);
  } catch (const Error& e) {
    std::cerr << "bform: " << e.what() << '\n';
    return exit_code(e.code());
  }
  return kOk;
}
