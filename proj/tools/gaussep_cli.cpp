// gaussep: command-line front end.
//
//   gaussep check     --input state.json [--eps e]
//   gaussep certify   --input state.json
//   gaussep sweep     --input state.json (--eps a,b,c | --eps-grid lo:hi:points) [--format csv|json]
//   gaussep threshold --input state.json
//   gaussep gen       tmss --r 1 | random --n 2 --m 1 --seed 7 | product | vacuum | separable
//
// Exit status: 0 when a result was computed (undecided included), 2 on bad
// input, 3 on numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gaussep/gaussep.hpp"
#include "gaussep/io.hpp"

namespace {

using namespace gaussep;
using json = nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string input;
  std::string output;
  ToleranceConfig tol;
  int max_iter = kDefaultMaxIter;
};

void add_common(CLI::App* cmd, Common& c, bool needs_input) {
  auto* in = cmd->add_option("--input,-i", c.input, "state JSON file ('-' for stdin)");
  if (needs_input) in->required();
  cmd->add_option("--output,-o", c.output, "write the result here instead of stdout");
  cmd->add_option("--tol-psd", c.tol.psd_tol, "relative eigenvalue tolerance");
  cmd->add_option("--tol-pinv", c.tol.pinv_rcond, "pseudoinverse cutoff");
  cmd->add_option("--margin", c.tol.decision_margin, "decision margin");
  cmd->add_option("--max-iter", c.max_iter, "iteration cap");
}

std::string read_input(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open input file '" + path + "'");
    ss << f.rdbuf();
  }
  return ss.str();
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw InputError("cannot write '" + c.output + "'");
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
}

void emit(const Common& c, const json& j) { emit(c, j.dump(2)); }

BipartiteCM load_state(const Common& c) {
  c.tol.validate();
  if (c.max_iter < 1) throw InputError("--max-iter must be at least 1");
  return io::state_from_string(read_input(c.input), c.tol);
}

/// "lo:hi:points", log-spaced.
std::vector<Real> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw InputError("--eps-grid expects lo:hi:points");
  try {
    return log_grid(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError("--eps-grid: cannot parse '" + spec + "'");
  }
}

std::string format_real(Real x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

int run(CLI::App& app, int argc, char** argv) {
  Common common;
  std::vector<Real> eps_list;
  Real robust_eps = 0.0;
  std::string grid;
  std::string format = "csv";

  auto* check = app.add_subcommand("check", "decide separability");
  add_common(check, common, true);
  check->add_option("--eps", robust_eps, "decide with eps slack on both sides")
      ->check(CLI::PositiveNumber);

  auto* certify = app.add_subcommand("certify", "certificate or entanglement witness");
  add_common(certify, common, true);

  auto* sweep_cmd = app.add_subcommand("sweep", "verdict and step count along gamma + eps*1");
  add_common(sweep_cmd, common, true);
  auto* eps_opt = sweep_cmd->add_option("--eps", eps_list, "explicit eps values")->delimiter(',');
  auto* grid_opt = sweep_cmd->add_option("--eps-grid", grid, "log-spaced grid lo:hi:points");
  eps_opt->excludes(grid_opt);
  sweep_cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* threshold = app.add_subcommand("threshold", "smallest eps with gamma + eps*1 separable");
  add_common(threshold, common, true);

  auto* gen = app.add_subcommand("gen", "write a state JSON");
  gen->require_subcommand(1);
  Real r = 1.0;
  int n = 1;
  int m = 1;
  std::uint64_t seed = 0;
  std::string purity = "mixed";
  auto* gen_tmss = gen->add_subcommand("tmss", "two-mode squeezed vacuum");
  gen_tmss->add_option("--r", r, "squeezing parameter")->check(CLI::NonNegativeNumber);
  auto* gen_random = gen->add_subcommand("random", "random valid CM");
  auto* gen_product = gen->add_subcommand("product", "random local CMs, no correlations");
  auto* gen_vacuum = gen->add_subcommand("vacuum", "identity");
  auto* gen_sep = gen->add_subcommand("separable", "gamma_A + gamma_B + R R^T");
  for (auto* g : {gen_random, gen_product, gen_vacuum, gen_sep}) {
    g->add_option("--n", n, "modes on A")->check(CLI::PositiveNumber);
    g->add_option("--m", m, "modes on B")->check(CLI::PositiveNumber);
  }
  for (auto* g : {gen_random, gen_product, gen_sep}) g->add_option("--seed", seed, "RNG seed");
  gen_random->add_option("--purity", purity, "pure or mixed")
      ->check(CLI::IsMember({"pure", "mixed"}));
  Common gen_out;
  gen->add_option("--output,-o", gen_out.output, "output file");

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  if (*check) {
    const BipartiteCM g = load_state(common);
    if (robust_eps > 0.0) {
      const RobustVerdict rv = decide_robust(g, common.tol, robust_eps, common.max_iter);
      json out = io::verdict_to_json(rv.deciding());
      out["verdict"] = to_string(rv.kind);
      out["robust_eps"] = rv.eps;
      out["route"] = to_string(rv.route);
      emit(common, out);
    } else {
      emit(common, io::verdict_to_json(decide(g, common.tol, common.max_iter)));
    }
    return 0;
  }

  if (*certify) {
    const BipartiteCM g = load_state(common);
    const Verdict v = decide(g, common.tol, common.max_iter);
    json out;
    if (v.kind == VerdictKind::separable) {
      const SeparabilityCertificate cert = reconstruct(v, common.tol);
      const CertificateCheck c = verify_certificate(g, cert, common.tol);
      out = io::certificate_to_json(cert, c);
      out["valid"] = c.valid;
    } else if (v.kind == VerdictKind::entangled) {
      out["witness"] = io::witness_to_json(entanglement_witness(v));
    }
    out["verdict"] = to_string(v.kind);
    out["step"] = v.step;
    emit(common, out);
    return 0;
  }

  if (*sweep_cmd) {
    const BipartiteCM g = load_state(common);
    std::vector<Real> eps = grid.empty() ? eps_list : parse_grid(grid);
    if (eps.empty()) throw InputError("sweep needs --eps or --eps-grid");
    for (Real e : eps) {
      if (!(e > 0.0)) throw InputError("sweep: eps values must be > 0");
    }
    const std::vector<SweepPoint> pts =
        sweep(g, RMat::Identity(g.dim(), g.dim()), eps, common.tol, common.max_iter);
    if (format == "json") {
      json rows = json::array();
      for (const SweepPoint& p : pts) {
        rows.push_back({{"eps", p.eps}, {"verdict", to_string(p.kind)}, {"steps", p.steps}});
      }
      emit(common, rows);
    } else {
      std::ostringstream os;
      os << "eps,verdict,steps\n";
      for (const SweepPoint& p : pts) {
        os << format_real(p.eps) << ',' << to_string(p.kind) << ',' << p.steps << '\n';
      }
      emit(common, os.str());
    }
    return 0;
  }

  if (*threshold) {
    const BipartiteCM g = load_state(common);
    ThresholdOptions opts;
    opts.max_iter = common.max_iter;
    const ThresholdResult t =
        find_threshold(g, RMat::Identity(g.dim(), g.dim()), common.tol, opts);
    emit(common, json{{"threshold", t.value},
                      {"lo", t.lo},
                      {"hi", t.hi},
                      {"evaluations", t.evaluations},
                      {"undecided", t.undecided}});
    return 0;
  }

  BipartiteCM state;
  if (*gen_tmss) {
    state = tmss(r);
  } else if (*gen_random) {
    state = random_cm(n, m, purity == "pure" ? Purity::pure : Purity::mixed, seed);
  } else if (*gen_product) {
    const BipartiteCM a = random_cm(n, 1, Purity::mixed, seed);
    const BipartiteCM b = random_cm(m, 1, Purity::mixed, seed + 1);
    state = product(a.A, b.A);
  } else if (*gen_vacuum) {
    state = vacuum(n, m);
  } else {
    state = random_separable(n, m, seed).gamma;
  }
  emit(gen_out, io::state_to_json(state));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separability of bipartite Gaussian states"};
  try {
    return run(app, argc, argv);
  } catch (const gaussep::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const gaussep::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
