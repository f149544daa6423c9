#pragma once

// Command-line front end. `run` is the whole program; tools/muskat_cli.cpp
// only forwards argv.
//
// Exit codes: 0 success, 1 numerical failure, 2 invalid input.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "muskat/muskat.hpp"
#include "muskat/table.hpp"

namespace muskat::cli {

enum ExitCode : int { kOk = 0, kNumerical = 1, kInvalid = 2 };

struct RunConfig {
  PhysicalParams phys{};
  NumericOptions num{};
  int n = 0;  ///< 0: command default
  std::string format = "csv";
  std::string out;  ///< empty: stdout
  int precision = 17;

  void validate() const {
    phys.validate();
    if (!(num.ode_tol > 0.0)) throw DomainError("ode_tol must be positive");
    if (!(num.root_tol > 0.0)) throw DomainError("root_tol must be positive");
    if (!(num.quad.abs_tol > 0.0)) throw DomainError("quad_tol must be positive");
    if (!(num.alpha_max > 1.0)) throw DomainError("alpha_max must exceed 1");
    if (n != 0 && n < 2) throw DomainError("n must be >= 2");
    if (format != "csv" && format != "json") throw DomainError("format must be csv or json");
    if (precision < 6 || precision > 17) throw DomainError("precision must lie in [6, 17]");
  }
};

/// Applies a JSON config object; unknown keys are rejected.
inline void apply_config(RunConfig& cfg, const nlohmann::json& j) {
  for (const auto& [key, v] : j.items()) {
    if (key == "g") cfg.phys.grav = v.get<double>();
    else if (key == "rho_plus") cfg.phys.rho_plus = v.get<double>();
    else if (key == "rho_minus") cfg.phys.rho_minus = v.get<double>();
    else if (key == "h") cfg.phys.h = v.get<double>();
    else if (key == "tol" || key == "ode_tol") cfg.num.ode_tol = v.get<double>();
    else if (key == "root_tol") cfg.num.root_tol = v.get<double>();
    else if (key == "quad_tol") cfg.num.quad.abs_tol = v.get<double>();
    else if (key == "alpha_max") cfg.num.alpha_max = v.get<double>();
    else if (key == "n") cfg.n = v.get<int>();
    else if (key == "format") cfg.format = v.get<std::string>();
    else if (key == "out") cfg.out = v.get<std::string>();
    else if (key == "precision") cfg.precision = v.get<int>();
    else throw DomainError("config: unknown key '" + key + "'");
  }
}

namespace detail {

inline void emit(const io::Table& t, const RunConfig& cfg, std::ostream& stdout_) {
  auto write = [&](std::ostream& os) {
    if (cfg.format == "json") io::write_json(os, t, cfg.precision);
    else io::write_csv(os, t, cfg.precision);
  };
  if (cfg.out.empty()) {
    write(stdout_);
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + cfg.out);
  write(f);
  if (!f) throw std::runtime_error("write failed: " + cfg.out);
}

inline void add_physical_meta(io::Table& t, const PhysicalParams& p) {
  t.meta("g", p.grav);
  t.meta("rho_plus", p.rho_plus);
  t.meta("rho_minus", p.rho_minus);
  t.meta("h", p.h);
}

inline std::string regime_text(const Regime& r) {
  return std::string("regime ") + roman(r.kind) + " " + to_string(r.kind);
}

}  // namespace detail

inline io::Table cmd_constants(const RunConfig& cfg, int l_max) {
  const auto& k = constants();
  const PhysicalParams& p = cfg.phys;
  io::Table t;
  t.command = "constants";
  t.meta("lambda_star", k.lambda_star);
  t.meta("lambda_star_source", std::string("B(3/4,1/2)^2/(2 pi^2), beta via Lanczos log-gamma"));
  t.meta("beta_3_4_1_2", k.beta_3_4_1_2);
  t.meta("h_star", k.h_star);
  t.meta("h_star_source", std::string("sqrt(2/lambda_star)"));
  t.meta("gamma_star", gamma_star(p));
  detail::add_physical_meta(t, p);
  const Regime r = lambda_h(p, cfg.num.root_tol, cfg.num.quad);
  t.meta("regime", detail::regime_text(r));
  t.meta("lambda_h", r.lambda_h);
  t.meta("gamma_h", r.gamma_h);
  t.columns = {"l", "gamma_bar_l", "gamma_star_over_l2"};
  for (int l = 1; l <= l_max; ++l) {
    t.rows.push_back({static_cast<double>(l), gamma_bar(p, l), gamma_star(p) / (static_cast<double>(l) * l)});
  }
  return t;
}

inline io::Table cmd_classify(const RunConfig& cfg, int l_max) {
  const PhysicalParams& p = cfg.phys;
  io::Table t;
  t.command = "classify";
  detail::add_physical_meta(t, p);
  t.meta("h_star", constants().h_star);
  t.meta("regime", detail::regime_text(lambda_h(p, cfg.num.root_tol, cfg.num.quad)));
  t.meta("regime_code", std::string("1 TOUCHES_BOUNDARY, 2 BOTH_BLOWUP, 3 SLOPE_BLOWUP"));
  t.columns = {"l", "regime_code", "lambda_lh", "gamma_lh", "gamma_bar_l", "gamma_upper_l"};
  for (int l = 1; l <= l_max; ++l) {
    const Regime r = mode_regime(p, l, cfg.num.root_tol, cfg.num.quad);
    const double l2 = static_cast<double>(l) * l;
    t.rows.push_back({static_cast<double>(l), static_cast<double>(static_cast<int>(r.kind) + 1), r.lambda_h,
                      r.gamma_h, gamma_bar(p, l), r.gamma_h / l2});
  }
  return t;
}

inline io::Table cmd_branch(const RunConfig& cfg, int l, int n_points) {
  const PhysicalParams& p = cfg.phys;
  const Branch b = trace_branch(p, l, n_points, cfg.num);
  io::Table t;
  t.command = "branch";
  detail::add_physical_meta(t, p);
  t.meta("l", static_cast<long long>(l));
  t.meta("units", std::string("lambda 1/length^2, gamma force/length, alpha and max_slope dimensionless, "
                              "amplitude length, quarter_period radians of x"));
  t.meta("regime", detail::regime_text(b.regime));
  const double l2 = static_cast<double>(l) * l;
  t.meta("lambda_endpoint", b.regime.lambda_h * l2);
  t.meta("gamma_endpoint", b.regime.gamma_h / l2);
  if (b.regime.kind == RegimeKind::touches_boundary) {
    // closure point of the admissible window: amplitude equals h there
    const BranchPoint end = branch_point(p, l, b.regime.lambda_h, cfg.num);
    t.meta("endpoint_alpha", end.alpha);
    t.meta("endpoint_amplitude", end.amplitude);
  }
  t.meta("truncated_points", static_cast<long long>(b.truncated_lambdas.size()));
  t.columns = {"lambda", "gamma", "alpha", "amplitude", "max_slope", "quarter_period", "truncated_flag"};
  // merge computed and truncated nodes back into grid order
  const double nan = std::nan("");
  std::size_t i = 0, j = 0;
  while (i < b.points.size() || j < b.truncated_lambdas.size()) {
    const bool take_trunc = j < b.truncated_lambdas.size() &&
                            (i >= b.points.size() || b.truncated_lambdas[j] < b.points[i].lambda_base);
    if (take_trunc) {
      const double lam = b.truncated_lambdas[j++] * l2;
      t.rows.push_back({lam, gamma_of_lambda(p, lam), nan, nan, nan, nan, 1.0});
    } else {
      const auto& bp = b.points[i++];
      t.rows.push_back({bp.lambda, bp.gamma, bp.alpha, bp.amplitude, bp.alpha, bp.quarter_period, 0.0});
    }
  }
  return t;
}

struct ProfileRequest {
  std::optional<double> lambda;
  std::optional<double> gamma;
  int l = 1;
  Parity parity = Parity::odd;
  bool minus = false;
  int n = 512;
};

inline io::Table cmd_profile(const RunConfig& cfg, const ProfileRequest& req) {
  const PhysicalParams& p = cfg.phys;
  if (req.l < 1) throw DomainError("l must be >= 1");
  if (req.lambda.has_value() == req.gamma.has_value()) throw DomainError("give exactly one of --lambda, --gamma");
  if (req.n % req.l != 0) throw DomainError("n must be a multiple of l");
  const double lambda = req.lambda ? *req.lambda : lambda_of_gamma(p, *req.gamma);
  const double l2 = static_cast<double>(req.l) * req.l;
  const Regime r = mode_regime(p, req.l, cfg.num.root_tol, cfg.num.quad);
  const double lo = r.lambda_h * l2, hi = l2;
  const double base = lambda / l2;
  if (!(lambda > lo && lambda <= hi)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "lambda = " << lambda << " outside the feasible window (lambda_h, 1] scaled by l^2 = (" << lo << ", "
        << hi << "]";
    throw OutOfRangeError(msg.str());
  }
  const std::size_t per_period = static_cast<std::size_t>(req.n / req.l);
  SolutionProfile s = scale_profile(profile_at(base, per_period, cfg.num), req.l);
  if (req.parity == Parity::even) s = translate_even(s, req.l);
  if (req.minus) s = negate(s);
  const Residual res = residual(s);

  io::Table t;
  t.command = "profile";
  detail::add_physical_meta(t, p);
  t.meta("lambda", lambda);
  t.meta("gamma", gamma_of_lambda(p, lambda));
  t.meta("alpha", std::abs(s.alpha));
  t.meta("l", static_cast<long long>(req.l));
  t.meta("period", s.period);
  t.meta("domain", 2.0 * std::numbers::pi);
  t.meta("parity", std::string(to_string(req.parity)));
  t.meta("sign", std::string(req.minus ? "minus" : "plus"));
  t.meta("residual", res.ode_residual_max);
  t.meta("mean_abs", res.mean_abs);
  t.columns = {"x", "f", "f_prime"};
  for (int c = 0; c < req.l; ++c) {
    for (const auto& v : s.samples) t.rows.push_back({v.x + c * s.period, v.f, v.g});
  }
  return t;
}

/// Upper bound on the internal profile grid of the pendulum command.
inline constexpr std::size_t kMaxProfileSamples = std::size_t{1} << 22;

inline io::Table cmd_pendulum(const RunConfig& cfg, double lambda, int n, std::ostream& err) {
  const double alpha = alpha_of_lambda(lambda, cfg.num.root_tol, cfg.num.alpha_max, cfg.num.quad);
  // the arc length is accumulated on a grid fine enough for the steepest part
  const std::size_t wanted = resolving_samples(alpha, static_cast<std::size_t>(n));
  const std::size_t n_profile = std::min<std::size_t>(wanted, kMaxProfileSamples);
  std::string warning;
  if (alpha > 1e3) {
    warning = "alpha(lambda) = " + std::to_string(alpha) + ": close to lambda_*, slope blow-up";
    if (wanted > n_profile) warning += "; arc length under-resolved, L_arclength unreliable";
    err << "warning: " << warning << '\n';
  }
  const double l_formula = pendulum_period_from_alpha(lambda, alpha, cfg.num.quad);
  SolutionProfile even = translate_even(profile_at(lambda, n_profile, cfg.num), 1);
  const PendulumTrajectory tr = to_pendulum(even, static_cast<std::size_t>(n));
  double sup = 0.0;
  for (const auto& v : tr.samples) sup = std::max(sup, std::abs(v.theta));

  io::Table t;
  t.command = "pendulum";
  t.meta("lambda", lambda);
  t.meta("alpha", alpha);
  t.meta("L_formula", l_formula);
  t.meta("L_arclength", tr.period_L);
  t.meta("L_difference", tr.period_L - l_formula);
  t.meta("sup_theta", sup);
  t.meta("arctan_alpha", std::atan(alpha));
  t.meta("profile_samples", static_cast<long long>(n_profile));
  if (!warning.empty()) t.meta("warning", warning);
  t.columns = {"s", "theta", "theta_prime"};
  for (const auto& v : tr.samples) t.rows.push_back({v.s, v.theta, v.theta_prime});
  return t;
}

inline io::Table cmd_coexist(const RunConfig& cfg, int l_max) {
  const auto levels = coexistence_levels(cfg.phys, l_max, cfg.num.root_tol);
  io::Table t;
  t.command = "coexist";
  detail::add_physical_meta(t, cfg.phys);
  t.meta("lambda_star", constants().lambda_star);
  t.meta("condition", std::string("gamma_bar_{l+1} < gamma_bar_l < gamma_*/(l+1)^2 < gamma_*/l^2"));
  t.meta("l_max", static_cast<long long>(l_max));
  t.columns = {"l", "gamma_lo", "gamma_hi"};
  for (const auto& c : levels) t.rows.push_back({static_cast<double>(c.l), c.gamma_lo, c.gamma_hi});
  return t;
}

inline io::Table cmd_expansion(const RunConfig& cfg, int l, const std::vector<double>& eps) {
  const ExpansionFit fit = expansion_check(cfg.phys, l, eps, 256, cfg.num);
  io::Table t;
  t.command = "expansion-check";
  detail::add_physical_meta(t, cfg.phys);
  t.meta("l", static_cast<long long>(l));
  t.meta("gamma_bar_l", gamma_bar(cfg.phys, l));
  t.meta("fitted_coefficient", fit.coefficient);
  t.meta("expected_coefficient", fit.expected);
  t.meta("relative_error", std::abs(fit.coefficient - fit.expected) / fit.expected);
  t.columns = {"eps", "gamma", "ratio"};
  for (std::size_t i = 0; i < fit.eps.size(); ++i) t.rows.push_back({fit.eps[i], fit.gamma[i], fit.ratio[i]});
  return t;
}

/// Entire CLI. Flags: CLI > --config file > defaults.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Steady fingering branches of the periodic Muskat problem"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");
  app.fallthrough();

  std::optional<double> g, rho_plus, rho_minus, h, tol, lambda, gamma;
  std::optional<int> n, precision;
  std::optional<std::string> format, out_path;
  std::string config_path, parity = "odd", sign = "plus";
  int l = 1;
  bool l_given = false;
  std::vector<double> eps{0.02, 0.04, 0.08};

  app.add_option("--g", g, "gravitational acceleration");
  app.add_option("--rho-plus", rho_plus, "density of the upper fluid");
  app.add_option("--rho-minus", rho_minus, "density of the lower fluid");
  app.add_option("--h", h, "cell half-height");
  auto* l_opt = app.add_option("--l", l, "mode number (l_max for constants/classify/coexist)");
  auto* lam_opt = app.add_option("--lambda", lambda, "g (rho_+ - rho_-) / gamma");
  auto* gam_opt = app.add_option("--gamma", gamma, "surface tension");
  lam_opt->excludes(gam_opt);
  app.add_option("--n", n, "grid points or samples");
  app.add_option("--tol", tol, "ODE local error tolerance");
  app.add_option("--format", format, "csv or json");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--precision", precision, "significant digits in [6, 17]");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--parity", parity, "odd or even")->check(CLI::IsMember({"odd", "even"}));
  app.add_option("--sign", sign, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
  app.add_option("--eps", eps, "amplitudes for expansion-check");

  const char* names[] = {"constants", "branch", "profile", "pendulum", "classify", "coexist", "expansion-check"};
  for (const char* name : names) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  l_given = l_opt->count() > 0;
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream cf(config_path);
      if (!cf) throw DomainError("cannot read config file " + config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(cf);
      } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("config: ") + e.what());
      }
      apply_config(cfg, j);
    }
    if (g) cfg.phys.grav = *g;
    if (rho_plus) cfg.phys.rho_plus = *rho_plus;
    if (rho_minus) cfg.phys.rho_minus = *rho_minus;
    if (h) cfg.phys.h = *h;
    if (tol) cfg.num.ode_tol = *tol;
    if (n) cfg.n = *n;
    if (format) cfg.format = *format;
    if (out_path) cfg.out = *out_path;
    if (precision) cfg.precision = *precision;
    cfg.validate();

    io::Table t;
    if (cmd == "constants") {
      t = cmd_constants(cfg, l_given ? l : 5);
    } else if (cmd == "classify") {
      t = cmd_classify(cfg, l_given ? l : 5);
    } else if (cmd == "branch") {
      t = cmd_branch(cfg, l, cfg.n ? cfg.n : 50);
    } else if (cmd == "profile") {
      ProfileRequest req;
      req.lambda = lambda;
      req.gamma = gamma;
      req.l = l;
      req.parity = parity == "even" ? Parity::even : Parity::odd;
      req.minus = sign == "minus";
      req.n = cfg.n ? cfg.n : 512;
      t = cmd_profile(cfg, req);
    } else if (cmd == "pendulum") {
      if (!lambda && !gamma) throw DomainError("pendulum: give --lambda or --gamma");
      const double lam = lambda ? *lambda : lambda_of_gamma(cfg.phys, *gamma);
      t = cmd_pendulum(cfg, lam, cfg.n ? cfg.n : 512, err);
    } else if (cmd == "coexist") {
      t = cmd_coexist(cfg, l_given ? l : 5);
    } else {
      t = cmd_expansion(cfg, l, eps);
    }
    detail::emit(t, cfg, out);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.numerical() ? kNumerical : kInvalid;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace muskat::cli
