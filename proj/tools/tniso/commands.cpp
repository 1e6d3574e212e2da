#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tniso/version.hpp"

namespace tniso::cli {

namespace {

constexpr double kExample2P = 0.4;
constexpr double kExample2Epsilon = 0.05;
constexpr std::size_t kExample2Iters = 10;

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

void require(const std::string& value, const char* flag, const std::string& command) {
  if (value.empty()) throw ParseError(command + " requires " + flag);
}

KrausChannel load_channel(const std::string& path) { return channel_from_json(read_json_file(path), 1e-8); }
IsometricEncoding load_code(const std::string& path) { return encoding_from_json(read_json_file(path)); }

struct Outcome {
  int exit_code = kExitOk;
  Json results;
  std::string text;
};

// --- check-channel -----------------------------------------------------------

Outcome check_channel(const RunConfig& cfg) {
  require(cfg.channel, "--channel", cfg.command);
  const auto kraus = kraus_from_json(read_json_file(cfg.channel));
  const double r = KrausChannel::tp_residual_of(kraus);
  const bool tp = r <= cfg.tol;
  Outcome o;
  o.results = {{"dim_in", kraus.front().cols()},
               {"dim_out", kraus.front().rows()},
               {"kraus_count", kraus.size()},
               {"tp_residual", r},
               {"trace_preserving", tp}};
  std::ostringstream os;
  os << "channel " << kraus.front().cols() << " -> " << kraus.front().rows() << ", " << kraus.size()
     << " Kraus operators\n"
     << "trace preservation residual " << fmt(r) << (tp ? " (ok)" : " (exceeds tolerance)") << '\n';
  o.text = os.str();
  o.exit_code = tp ? kExitOk : kExitVerdict;
  return o;
}

// --- classify ----------------------------------------------------------------

std::string verdict_table(const ClassificationReport& r) {
  const std::pair<const char*, const Verdict*> rows[] = {
      {"fixed", &r.fixed},
      {"preserved", &r.preserved},
      {"noiseless_certificate", &r.noiseless_certificate},
      {"correctable", &r.correctable},
      {"completely_correctable", &r.completely_correctable},
      {"protectable", &r.protectable},
      {"unitarily_correctable", &r.unitarily_correctable},
      {"unitarily_recoverable", &r.unitarily_recoverable},
  };
  std::ostringstream os;
  os << std::left << std::setw(24) << "property" << std::setw(8) << "value"
     << "residual\n";
  for (const auto& [name, v] : rows) {
    os << std::left << std::setw(24) << name << std::setw(8) << (v->value ? "true" : "false")
       << fmt(v->residual, 3) << '\n';
  }
  os << "horizon " << r.horizon << ", tolerance " << fmt(r.tolerance) << '\n';
  return os.str();
}

Outcome classify_cmd(const RunConfig& cfg) {
  require(cfg.channel, "--channel", cfg.command);
  require(cfg.code, "--code", cfg.command);
  const KrausChannel e = load_channel(cfg.channel);
  const IsometricEncoding phi = load_code(cfg.code);
  if (e.dim_in() != phi.physical_dim()) throw ParseError("channel and code dimensions differ");
  const ClassificationReport r = classify(phi, e, cfg.horizon, cfg.tol);
  return {kExitOk, to_json(r), verdict_table(r)};
}

// --- correct -----------------------------------------------------------------

Outcome correct_cmd(const RunConfig& cfg) {
  require(cfg.channel, "--channel", cfg.command);
  require(cfg.code, "--code", cfg.command);
  const KrausChannel e = load_channel(cfg.channel);
  const IsometricEncoding phi = load_code(cfg.code);
  if (e.dim_in() != phi.physical_dim()) throw ParseError("channel and code dimensions differ");
  const RecoveryStrategy strategy = parse_strategy(cfg.strategy);
  Outcome o;
  try {
    const Correction c = build_correction(phi, e, strategy, cfg.tol);
    const bool verified = c.fixed_residual <= 10.0 * cfg.tol;
    o.results = {{"strategy_requested", to_string(strategy)},
                 {"strategy_used", to_string(c.strategy_used)},
                 {"fell_back", c.fell_back},
                 {"time_reversal_form", to_string(c.form)},
                 {"printed_form_valid", c.printed_form_valid ? Json(*c.printed_form_valid) : Json(nullptr)},
                 {"verification", {{"fixed_residual", c.fixed_residual}, {"fixed", verified}}},
                 {"recovery", channel_to_json(c.recovery)}};
    if (!cfg.recovery.empty()) write_json_file(cfg.recovery, channel_to_json(c.recovery));
    std::ostringstream os;
    os << "recovery: " << c.recovery.kraus_count() << " Kraus operators on dimension "
       << c.recovery.dim_out() << " (" << to_string(c.strategy_used)
       << (c.fell_back ? ", fallback" : "") << ")\n"
       << "code fixed under R o E: residual " << fmt(c.fixed_residual) << '\n';
    if (!cfg.recovery.empty()) os << "wrote " << cfg.recovery << '\n';
    o.text = os.str();
    o.exit_code = verified ? kExitOk : kExitVerdict;
  } catch (const NotCorrectable& ex) {
    o.results = {{"correctable", false}, {"residual", ex.residual()}, {"reason", ex.what()}};
    o.text = std::string("not correctable: ") + ex.what() +
             "\na code is correctable exactly when it is preserved by the channel\n";
    o.exit_code = kExitVerdict;
  }
  return o;
}

// --- simulate ----------------------------------------------------------------

struct Example2Run {
  SimulationTrace trace;
  EpsilonEstimate per_round;
};

ComplexMatrix plus_state() { return ComplexMatrix::Constant(2, 2, Complex(0.5, 0.0)); }

Example2Run run_example2(double p, double eps, std::size_t n, const RunConfig& cfg) {
  const RepetitionExample ex = make_repetition_example(p);
  const KrausChannel e = make_example2_channel(p, eps);
  const Superoperator round = compose(ex.recovery, e).superoperator().after(ex.encoding.superoperator());
  EpsilonEstimate est = estimate_epsilon(round, ex.encoding, cfg.samples, cfg.refine_steps, cfg.seed);
  SimulationOptions opts;
  opts.epsilon = est.upper_bound;
  opts.decoding = ex.encoding.decomposition();
  const DensityOperator rho0 = encode(ex.encoding, DensityOperator(plus_state()));
  return {simulate_iterated(e, ex.recovery, rho0, n, opts), std::move(est)};
}

void write_csv(const std::string& path, const SimulationTrace& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17) << "n,error,decoded_error,linear_bound,geometric_bound\n";
  for (std::size_t i = 0; i < t.errors.size(); ++i) {
    out << i << ',' << t.errors[i] << ',';
    if (i < t.decoded_errors.size()) out << t.decoded_errors[i];
    out << ',' << t.linear_bound[i] << ',';
    if (t.geometric_bound) out << *t.geometric_bound;
    out << '\n';
  }
}

Outcome finish_simulation(const RunConfig& cfg, const SimulationTrace& t,
                          const std::optional<EpsilonEstimate>& est, Json extra) {
  const LinearBoundCheck lin = check_prop3_bound(t, t.epsilon);
  const GeometricBoundCheck geo = check_geometric_bound(t, t.epsilon);
  Outcome o;
  o.results = std::move(extra);
  o.results["trace"] = to_json(t);
  o.results["linear_bound_check"] = {{"holds", lin.holds}, {"margin", lin.margin}};
  o.results["geometric_bound_check"] = {{"applicable", geo.applicable},
                                        {"holds", geo.holds},
                                        {"alpha_max", geo.alpha_max},
                                        {"bound", geo.bound}};
  if (est) o.results["per_round_epsilon"] = to_json(*est);
  if (!cfg.csv.empty()) write_csv(cfg.csv, t);

  std::ostringstream os;
  const std::size_t n = t.iterations;
  os << "iterations " << n << ", per-round epsilon " << fmt(t.epsilon) << '\n';
  os << "final error " << fmt(t.errors.back());
  if (!t.decoded_errors.empty()) os << ", decoded error " << fmt(t.decoded_errors.back());
  os << '\n';
  if (!t.decoded_states.empty()) {
    const ComplexMatrix& dm = t.decoded_states.back();
    os << "decoded final state\n";
    for (Eigen::Index i = 0; i < dm.rows(); ++i) {
      os << "  ";
      for (Eigen::Index k = 0; k < dm.cols(); ++k) {
        os << std::fixed << std::setprecision(3) << std::setw(8) << dm(i, k).real();
      }
      os << '\n';
    }
    os.unsetf(std::ios::floatfield);
  }
  os << "linear bound e_n <= n eps: " << (lin.holds ? "holds" : "VIOLATED") << " (margin "
     << fmt(lin.margin) << ")\n";
  if (geo.applicable) {
    os << "geometric bound eps/(1-alpha): " << fmt(geo.bound) << " with alpha_max " << fmt(geo.alpha_max)
       << (geo.holds ? " (holds)" : " (VIOLATED)") << '\n';
  } else {
    os << "geometric bound: not applicable\n";
  }
  o.text = os.str();
  o.exit_code = lin.holds && (!geo.applicable || geo.holds) ? kExitOk : kExitVerdict;
  return o;
}

Outcome simulate_cmd(const RunConfig& cfg) {
  if (!cfg.preset.empty()) {
    if (cfg.preset != "example2") throw ParseError("unknown preset '" + cfg.preset + "'");
    const double p = cfg.p.value_or(kExample2P);
    const double eps = cfg.epsilon.value_or(kExample2Epsilon);
    Example2Run run = run_example2(p, eps, cfg.iters, cfg);
    return finish_simulation(cfg, run.trace, run.per_round,
                             {{"preset", "example2"}, {"p", p}, {"mixing_epsilon", eps}});
  }
  require(cfg.channel, "--channel", cfg.command);
  require(cfg.recovery, "--recovery", cfg.command);
  require(cfg.state, "--state", cfg.command);
  const KrausChannel e = load_channel(cfg.channel);
  const KrausChannel r = load_channel(cfg.recovery);
  const DensityOperator given = state_from_json(read_json_file(cfg.state));
  std::optional<IsometricEncoding> phi;
  if (!cfg.code.empty()) phi = load_code(cfg.code);

  std::optional<DensityOperator> rho0;
  if (given.dim() == e.dim_in()) {
    rho0 = given;
  } else if (phi && given.dim() == phi->logical_dim()) {
    rho0 = encode(*phi, given);
  } else {
    throw ParseError("state dimension matches neither the channel nor the code's logical space");
  }
  if (phi && phi->physical_dim() != e.dim_in()) throw ParseError("channel and code dimensions differ");
  if (r.dim_in() != e.dim_out() || r.dim_out() != e.dim_in()) {
    throw ParseError("recovery dimensions do not match the channel");
  }

  SimulationOptions opts;
  std::optional<EpsilonEstimate> est;
  if (cfg.epsilon) {
    opts.epsilon = *cfg.epsilon;
  } else if (phi) {
    const Superoperator round = compose(r, e).superoperator().after(phi->superoperator());
    est = estimate_epsilon(round, *phi, cfg.samples, cfg.refine_steps, cfg.seed);
    opts.epsilon = est->upper_bound;
  }
  if (phi) opts.decoding = phi->decomposition();
  const SimulationTrace t = simulate_iterated(e, r, *rho0, cfg.iters, opts);
  return finish_simulation(cfg, t, est, Json::object());
}

// --- epsilon -----------------------------------------------------------------

Outcome epsilon_cmd(const RunConfig& cfg) {
  require(cfg.channel, "--channel", cfg.command);
  require(cfg.code, "--code", cfg.command);
  const KrausChannel e = load_channel(cfg.channel);
  const IsometricEncoding phi = load_code(cfg.code);
  if (e.dim_in() != phi.physical_dim()) throw ParseError("channel and code dimensions differ");
  Superoperator s = e.superoperator();
  if (!cfg.recovery.empty()) {
    const KrausChannel r = load_channel(cfg.recovery);
    if (r.dim_in() != e.dim_out()) throw ParseError("recovery dimensions do not match the channel");
    s = r.superoperator().after(s);
  }
  if (s.dim_out() != phi.physical_dim()) {
    throw ParseError("perturbed map must return to the code's physical space; pass --recovery");
  }
  const EpsilonEstimate est =
      estimate_epsilon(s.after(phi.superoperator()), phi, cfg.samples, cfg.refine_steps, cfg.seed);
  std::ostringstream os;
  os << "epsilon in [" << fmt(est.epsilon) << ", " << fmt(est.upper_bound) << "] (" << est.method.samples
     << " samples, " << est.method.refine_steps << " refinement steps, seed " << est.method.seed << ")\n";
  return {kExitOk, to_json(est), os.str()};
}

// --- example -----------------------------------------------------------------

struct Golden {
  Json checks = Json::array();
  std::ostringstream text;
  bool ok = true;

  void expect(const std::string& name, double value, double expected, double tol) {
    const double delta = std::abs(value - expected);
    const bool pass = delta <= tol;
    ok = ok && pass;
    checks.push_back({{"name", name},
                      {"value", value},
                      {"expected", expected},
                      {"delta", delta},
                      {"tolerance", tol},
                      {"pass", pass}});
    text << (pass ? "PASS " : "FAIL ") << name << ": " << fmt(value, 10) << " (expected " << fmt(expected, 10)
         << ", delta " << fmt(delta, 3) << ")\n";
  }
  void expect_true(const std::string& name, bool value) {
    ok = ok && value;
    checks.push_back({{"name", name}, {"pass", value}});
    text << (value ? "PASS " : "FAIL ") << name << '\n';
  }
};

void write_example_files(const RunConfig& cfg, const RepetitionExample& ex, const KrausChannel& noise,
                         Json& results) {
  if (cfg.out_dir.empty()) return;
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  write_json_file(dir / "channel.json", channel_to_json(noise));
  write_json_file(dir / "code.json", encoding_to_json(ex.encoding));
  write_json_file(dir / "recovery.json", channel_to_json(ex.recovery));
  results["files"] = {(dir / "channel.json").string(), (dir / "code.json").string(),
                      (dir / "recovery.json").string()};
}

Outcome example_repetition(const RunConfig& cfg) {
  const double p = cfg.p.value_or(kExample2P);
  const RepetitionExample ex = make_repetition_example(p);
  Golden g;

  const StructureReport image =
      detect_structure(ex.noise.superoperator().after(ex.encoding.superoperator()), cfg.tol, cfg.seed);
  g.expect_true("image of the code is 1-isometric", image.found);
  if (image.found) {
    const double expected[] = {1.0 - p, p / 3.0, p / 3.0, p / 3.0};
    for (Eigen::Index m = 0; m < 4; ++m) {
      const double w = m < image.weights.size() ? image.weights(m) : 0.0;
      g.expect("sigma weight " + std::to_string(m), w, expected[m], 1e-12);
    }
  }
  const NsFactorization ns =
      check_ns_factorization(ex.noise, ex.encoding.decomposition(), cfg.tol, {.input_cofactor_dim = 1});
  g.expect_true("channel acts as I (x) F on the code", ns.factorizes);
  if (ns.cofactor_channel) {
    const ComplexMatrix f00 = tniso::apply(*ns.cofactor_channel, matrix_unit(1, 0, 0));
    g.expect("F(|00><00|) distance to sigma", trace_norm(ComplexMatrix(f00 - ex.sigma.matrix())), 0.0, 1e-12);
  }
  const Verdict fixed = is_fixed(ex.encoding, compose(ex.recovery, ex.noise), cfg.tol);
  g.expect("code fixed under R o E", fixed.residual, 0.0, 1e-10);
  if (p == 0.0) {
    g.expect("noise is the identity", max_abs(ComplexMatrix(ex.noise.superoperator().matrix() -
                                                            Superoperator::identity(8).matrix())),
             0.0, 1e-15);
    g.expect("code fixed under the noise alone", is_fixed(ex.encoding, ex.noise, cfg.tol).residual, 0.0, 1e-12);
  }

  Outcome o;
  o.results = {{"example", "repetition"}, {"p", p}, {"checks", g.checks}, {"passed", g.ok}};
  write_example_files(cfg, ex, ex.noise, o.results);
  o.text = g.text.str();
  o.exit_code = g.ok ? kExitOk : kExitVerdict;
  return o;
}

Outcome example_example2(const RunConfig& cfg) {
  const double p = cfg.p.value_or(kExample2P);
  const double eps = cfg.epsilon.value_or(kExample2Epsilon);
  const std::size_t n = cfg.iters;
  Example2Run run = run_example2(p, eps, n, cfg);
  const ComplexMatrix& final_state = run.trace.decoded_states.back();
  const double off = final_state(0, 1).real();
  const double err = run.trace.decoded_errors.back();

  Golden g;
  const bool printed = p == kExample2P && eps == kExample2Epsilon && n == kExample2Iters;
  if (printed) {
    g.expect("decoded off-diagonal after 10 rounds", off, 0.332, 1e-3);
    g.expect("trace-norm error after 10 rounds", err, 0.335, 1e-3);
  } else {
    const double c = std::pow(1.0 - 2.0 * eps * p, static_cast<double>(n));
    g.expect("decoded off-diagonal", off, 0.5 * c, 1e-9);
    g.expect("trace-norm error", err, 1.0 - c, 1e-9);
  }
  g.expect("decoded diagonal", final_state(0, 0).real(), 0.5, 1e-9);
  g.expect_true("linear bound e_n <= n eps", check_prop3_bound(run.trace, run.trace.epsilon).holds);

  Outcome o;
  o.results = {{"example", "example2"},
               {"p", p},
               {"mixing_epsilon", eps},
               {"iterations", n},
               {"decoded_final_state", matrix_to_json(final_state)},
               {"decoded_error", err},
               {"per_round_epsilon", to_json(run.per_round)},
               {"checks", g.checks},
               {"passed", g.ok}};
  if (!cfg.out_dir.empty()) {
    const RepetitionExample ex = make_repetition_example(p);
    write_example_files(cfg, ex, make_example2_channel(p, eps), o.results);
  }
  o.text = g.text.str();
  o.exit_code = g.ok ? kExitOk : kExitVerdict;
  return o;
}

Outcome example_cmd(const RunConfig& cfg) {
  if (cfg.example == "repetition") return example_repetition(cfg);
  if (cfg.example == "example2") return example_example2(cfg);
  throw ParseError("unknown example '" + cfg.example + "' (expected repetition or example2)");
}

}  // namespace

double default_tolerance() {
  if (const char* env = std::getenv("TNISO_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return v;
    throw ParseError("TNISO_TOL must be a positive number");
  }
  return kDetectionTolerance;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw ParseError("tolerance must be positive");
  if (cfg.iters < 1) throw ParseError("--iters must be at least 1");
  if (cfg.horizon < 1) throw ParseError("--horizon must be at least 1");
  if (cfg.p && !(*cfg.p >= 0.0 && *cfg.p <= 1.0)) throw ParseError("--p must lie in [0, 1]");
  if (cfg.epsilon && !(*cfg.epsilon >= 0.0)) throw ParseError("--epsilon must be nonnegative");
}

Json config_to_json(const RunConfig& cfg) {
  return {{"command", cfg.command},
          {"channel", cfg.channel},
          {"code", cfg.code},
          {"recovery", cfg.recovery},
          {"state", cfg.state},
          {"out", cfg.out},
          {"csv", cfg.csv},
          {"out_dir", cfg.out_dir},
          {"preset", cfg.preset},
          {"example", cfg.example},
          {"strategy", cfg.strategy},
          {"iters", cfg.iters},
          {"horizon", cfg.horizon},
          {"tol", cfg.tol},
          {"seed", cfg.seed},
          {"samples", cfg.samples},
          {"refine_steps", cfg.refine_steps},
          {"p", cfg.p ? Json(*cfg.p) : Json(nullptr)},
          {"epsilon", cfg.epsilon ? Json(*cfg.epsilon) : Json(nullptr)}};
}

CommandResult run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  CommandResult res;
  res.report.tniso_version = kVersion;
  res.report.command = cfg.command;
  res.report.config = config_to_json(cfg);
  Outcome o;
  try {
    validate(cfg);
    if (cfg.command == "check-channel") {
      o = check_channel(cfg);
    } else if (cfg.command == "classify") {
      o = classify_cmd(cfg);
    } else if (cfg.command == "correct") {
      o = correct_cmd(cfg);
    } else if (cfg.command == "simulate") {
      o = simulate_cmd(cfg);
    } else if (cfg.command == "epsilon") {
      o = epsilon_cmd(cfg);
    } else if (cfg.command == "example") {
      o = example_cmd(cfg);
    } else {
      throw ParseError("unknown command '" + cfg.command + "'");
    }
  } catch (const ParseError& e) {
    o = {kExitInput, {{"error", e.what()}}, std::string("input error: ") + e.what() + '\n'};
  } catch (const ContractViolation& e) {
    o = {kExitInput, {{"error", e.what()}}, std::string("invalid input: ") + e.what() + '\n'};
  }
  res.exit_code = o.exit_code;
  res.report.results = std::move(o.results);
  res.text = std::move(o.text);
  res.report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!cfg.out.empty()) write_json_file(cfg.out, to_json(res.report));
  return res;
}

}  // namespace tniso::cli
