#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "bullbear/cli.hpp"
#include "bullbear/error.hpp"
#include "bullbear/fitter.hpp"
#include "bullbear/moments.hpp"
#include "bullbear/oracle.hpp"
#include "bullbear/simulator.hpp"

namespace bullbear::cli {

namespace {

// Exact arithmetic on (1 - j/N)^t grows like t log N bits; past this the
// floating backend is the sensible default.
constexpr double kAutoRationalMaxHorizon = 10'000;

bool is_whole(double t) { return std::isfinite(t) && t >= 0.0 && t == std::floor(t) && t <= 9.0e15; }

std::uint64_t whole_horizon(double t, const char* what) {
  if (!is_whole(t)) throw Error(Errc::invalid_argument, std::string(what) + " needs a nonnegative integer t");
  return static_cast<std::uint64_t>(t);
}

unsigned positive_order(const Json& j) {
  const auto n = j.get<long long>();
  if (n < 1) throw Error(Errc::invalid_argument, "moment order must be positive");
  return static_cast<unsigned>(n);
}

Json envelope(const std::string& method, const Json& request, Json outputs) {
  Json report{{"method", method}, {"tool_version", tool_version()}, {"inputs", request}, {"outputs", std::move(outputs)}};
  if (request.contains("seed")) report["seed"] = request["seed"];
  return report;
}

Json polynomial_json(const LogPolynomial& poly) {
  Json terms = Json::array();
  for (std::size_t i = 0; i < poly.exponents().size(); ++i) {
    terms.push_back({{"exponents", poly.exponents()[i]}, {"value", poly.coefficient(i).str()}});
  }
  return terms;
}

Json trace_json(const TermTrace& t) {
  return {{"exponents", t.exponents},       {"stirling_orders", t.stirling_orders},
          {"group_weight", t.group_weight}, {"finite_difference", t.finite_difference},
          {"j_terms", t.j_terms},           {"contribution", t.contribution}};
}

Json orders(unsigned n_max) {
  Json o = Json::array();
  for (unsigned n = 1; n <= n_max; ++n) o.push_back(n);
  return o;
}

Json sample_moments_json(const sim::SampleMoments& s, std::uint64_t horizon) {
  return {{"orders", orders(static_cast<unsigned>(s.moments.size()))},
          {"moments", s.moments},
          {"standard_errors", s.standard_errors},
          {"num_paths", s.num_paths},
          {"horizon", horizon}};
}

Json run_moments(const Json& req) {
  const auto params = params_from_json(req.at("params"));
  const double t = req.at("t").get<double>();
  const unsigned n_max = positive_order(req.at("n_max"));
  const auto mode = req.at("mode").get<std::string>();
  Json out{{"orders", orders(n_max)}, {"moments", Json::array()}};

  if (mode == "exact") {
    const auto backend = req.at("backend").get<std::string>();
    const bool trace = req.value("trace", false);
    Json traces = Json::array();
    if (backend == "rational") {
      const auto horizon = whole_horizon(t, "the rational backend");
      out["coefficients"] = Json::array();
      for (unsigned n = 1; n <= n_max; ++n) {
        Json order_trace = Json::array();
        TraceSink sink;
        if (trace) sink = [&](const TermTrace& term) { order_trace.push_back(trace_json(term)); };
        const auto poly = moment_multigroup_exact(params, horizon, n, sink);
        out["moments"].push_back(poly.evaluate(params.log_factors()));
        out["coefficients"].push_back(polynomial_json(poly));
        traces.push_back(std::move(order_trace));
      }
    } else if (backend == "float") {
      for (unsigned n = 1; n <= n_max; ++n) {
        Json order_trace = Json::array();
        TraceSink sink;
        if (trace) sink = [&](const TermTrace& term) { order_trace.push_back(trace_json(term)); };
        out["moments"].push_back(moment_multigroup(params, t, n, sink));
        traces.push_back(std::move(order_trace));
      }
    } else {
      throw Error(Errc::invalid_argument, "unknown backend '" + backend + "'");
    }
    out["backend"] = backend;
    if (trace) out["trace"] = std::move(traces);
    return envelope("exact", req, std::move(out));
  }

  if (mode == "limit") {
    const auto horizon = whole_horizon(t, "limit mode");
    std::vector<double> fractions;
    for (const auto c : params.initial_counts()) {
      fractions.push_back(static_cast<double>(c) / static_cast<double>(params.total_investors()));
    }
    for (unsigned n = 1; n <= n_max; ++n) {
      out["moments"].push_back(moment_limit(LimitParams{fractions, params.factors(), horizon, n}));
    }
    out["fractions"] = fractions;
    return envelope("limit", req, std::move(out));
  }

  if (mode == "binomial") {
    if (params.group_count() != 2) throw Error(Errc::invalid_argument, "binomial mode needs exactly two groups");
    const auto horizon = whole_horizon(t, "binomial mode");
    const double q_u =
        static_cast<double>(params.initial_counts()[1]) / static_cast<double>(params.total_investors());
    for (unsigned n = 1; n <= n_max; ++n) {
      out["moments"].push_back(moment_binomial(q_u, params.factors()[1], params.factors()[0], horizon, n));
    }
    out["q_u"] = q_u;
    return envelope("binomial", req, std::move(out));
  }

  if (mode == "mc") {
    if (!std::isfinite(t) || t < 0.0) throw Error(Errc::invalid_argument, "t must be nonnegative");
    const auto horizon = static_cast<std::uint64_t>(std::llround(t));
    const sim::SimConfig config{params, horizon, req.at("paths").get<std::uint64_t>(), n_max,
                                req.at("seed").get<std::uint64_t>()};
    if (config.num_paths == 0) throw Error(Errc::invalid_argument, "paths must be positive");
    return envelope("monte-carlo", req,
                    sample_moments_json(sim::estimate_moments(config, req.value("workers", 0U)), horizon));
  }

  throw Error(Errc::invalid_argument, "unknown mode '" + mode + "'");
}

Json run_simulate(const Json& req) {
  const sim::SimConfig config{params_from_json(req.at("params")), req.at("t").get<std::uint64_t>(),
                              req.at("paths").get<std::uint64_t>(), positive_order(req.at("n_max")),
                              req.at("seed").get<std::uint64_t>()};
  if (config.num_paths == 0) throw Error(Errc::invalid_argument, "paths must be positive");
  return envelope("monte-carlo", req,
                  sample_moments_json(sim::estimate_moments(config, req.value("workers", 0U)), config.horizon));
}

Json run_oracle(const Json& req) {
  const auto params = params_from_json(req.at("params"));
  const auto t = req.at("t").get<std::uint64_t>();
  const unsigned n_max = positive_order(req.at("n"));
  const auto budget = req.at("budget").get<std::uint64_t>();
  const auto distribution = oracle::enumerate_paths(params, t, budget);
  Json out{{"orders", orders(n_max)}, {"moments", Json::array()}, {"coefficients", Json::array()}};
  const auto g = static_cast<unsigned>(params.group_count());
  for (unsigned n = 1; n <= n_max; ++n) {
    const auto poly = oracle::moment_polynomial(distribution, n, g);
    out["moments"].push_back(poly.evaluate(params.log_factors()));
    out["coefficients"].push_back(polynomial_json(poly));
  }
  out["total_mass"] = distribution.total_mass.str();
  out["paths_visited"] = distribution.leaves;
  return envelope("oracle", req, std::move(out));
}

Json fit_json(const FitResult& r) {
  Json checks = Json::array();
  for (const auto& c : r.diagnostics.validity.checks) {
    checks.push_back({{"condition", c.condition}, {"passed", c.passed}, {"margin", c.margin}});
  }
  return {{"roots", r.roots},
          {"weights", r.weights},
          {"mapped_params", params_to_json(r.mapped_params)},
          {"mapped_horizon", r.mapped_horizon},
          {"diagnostics",
           {{"condition", r.diagnostics.condition},
            {"residual", r.diagnostics.residual},
            {"max_imaginary", r.diagnostics.max_imaginary},
            {"validity", checks}}}};
}

Json run_fit(const Json& req) {
  const auto& values = req.at("moments");
  const auto g = req.at("g").get<unsigned>();
  const auto anchor = req.at("anchor").get<std::uint64_t>();
  std::optional<std::uint64_t> total;
  if (req.contains("total") && !req["total"].is_null()) total = req["total"].get<std::uint64_t>();

  // "p/q" strings keep synthesized moments exact
  bool all_exact = !values.empty();
  for (const auto& v : values) all_exact = all_exact && v.is_string();
  FitResult result = [&] {
    if (all_exact) {
      std::vector<ExactRational> m;
      for (const auto& v : values) m.push_back(ExactRational::parse(v.get<std::string>()));
      return fit(std::span<const ExactRational>(m), g, anchor, total);
    }
    std::vector<double> m;
    for (const auto& v : values) {
      m.push_back(v.is_string() ? ExactRational::parse(v.get<std::string>()).to_double() : v.get<double>());
    }
    return fit(std::span<const double>(m), g, anchor, total);
  }();
  return envelope("fit", req, fit_json(result));
}

Json run_ingest(const Json& req) {
  std::vector<double> prices;
  for (const auto& row : req.at("prices")) prices.push_back(row.at("price").get<double>());
  const auto result =
      ingest(prices, req.at("stride").get<std::uint64_t>(), positive_order(req.at("n_max")));
  return envelope("ingest", req,
                  {{"orders", orders(static_cast<unsigned>(result.moments.size()))},
                   {"moments", result.moments},
                   {"windows", result.windows}});
}

Json moments_from_file(const std::string& path) {
  const auto j = read_json_file(path);
  if (j.is_array()) return j;
  if (j.is_object() && j.contains("moments")) return j["moments"];
  if (j.is_object() && j.contains("outputs") && j["outputs"].contains("moments")) return j["outputs"]["moments"];
  throw Error(Errc::parse_error, path + ": expected an array, {\"moments\": [...]}, or a report with outputs.moments");
}

Json prices_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  Json rows = Json::array();
  for (const auto& r : parse_prices_csv(in)) rows.push_back({{"t", r.t}, {"price", r.price}});
  return rows;
}

}  // namespace

std::string tool_version() { return "bullbear " BULLBEAR_VERSION; }

Json execute(const Json& request) {
  try {
    const auto command = request.at("command").get<std::string>();
    if (command == "moments") return run_moments(request);
    if (command == "simulate") return run_simulate(request);
    if (command == "oracle") return run_oracle(request);
    if (command == "fit") return run_fit(request);
    if (command == "ingest") return run_ingest(request);
    throw Error(Errc::invalid_argument, "unknown command '" + command + "'");
  } catch (const Json::exception& e) {
    throw Error(Errc::parse_error, std::string("request: ") + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moments, simulation and fitting for the bulls-vs-bears market model", "bullbear"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  std::string params_file;
  std::string out_file;
  std::string mode = "exact";
  std::string backend = "auto";
  std::string moments_file;
  std::string prices_file;
  std::string report_file;
  double t_real = 0.0;
  std::uint64_t t_int = 0;
  unsigned n_max = 0;
  std::uint64_t paths = 100'000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool trace = false;
  unsigned g = 0;
  std::uint64_t anchor = 0;
  std::optional<std::uint64_t> total;
  std::uint64_t stride = 1;
  std::uint64_t budget = oracle::default_enumeration_budget();

  auto* moments = app.add_subcommand("moments", "Moments of the log return");
  moments->add_option("--params", params_file, "Model parameters (JSON)")->required()->check(CLI::ExistingFile);
  moments->add_option("--t", t_real, "Horizon")->required();
  moments->add_option("--n-max", n_max, "Highest moment order")->required();
  moments->add_option("--mode", mode, "exact | limit | binomial | mc")
      ->check(CLI::IsMember({"exact", "limit", "binomial", "mc"}));
  moments->add_option("--backend", backend, "rational | float | auto")
      ->check(CLI::IsMember({"rational", "float", "auto"}));
  moments->add_option("--paths", paths, "Monte Carlo paths (mc mode)");
  moments->add_option("--seed", seed, "Monte Carlo seed (mc mode)");
  moments->add_option("--workers", workers, "Monte Carlo threads, 0 = all cores");
  moments->add_flag("--trace", trace, "Include every formula term in the report");
  moments->add_option("--out", out_file, "Report file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sample moments");
  simulate->add_option("--params", params_file)->required()->check(CLI::ExistingFile);
  simulate->add_option("--t", t_int)->required();
  simulate->add_option("--paths", paths)->required();
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--n-max", n_max)->required();
  simulate->add_option("--workers", workers);
  simulate->add_option("--out", out_file);

  auto* oracle_cmd = app.add_subcommand("oracle", "Moments by exhaustive path enumeration");
  oracle_cmd->add_option("--params", params_file)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--t", t_int)->required();
  oracle_cmd->add_option("--n", n_max, "Moments of order 1..n")->required();
  oracle_cmd->add_option("--budget", budget, "Maximum (g+1)^t paths (env BULLBEAR_ENUM_BUDGET)");
  oracle_cmd->add_option("--out", out_file);

  auto* fit_cmd = app.add_subcommand("fit", "Fit model parameters to raw moments");
  fit_cmd->add_option("--moments", moments_file, "JSON array, {\"moments\":[...]}, or a report")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--g", g, "Number of groups")->required();
  fit_cmd->add_option("--anchor", anchor, "Investors in the top group")->required();
  fit_cmd->add_option("--total", total, "Total investors (default: sum of group counts)");
  fit_cmd->add_option("--out", out_file);

  auto* ingest_cmd = app.add_subcommand("ingest", "Raw moments of log returns from a price CSV");
  ingest_cmd->add_option("--prices", prices_file, "CSV with header t,price")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--stride", stride)->required();
  ingest_cmd->add_option("--n-max", n_max)->required();
  ingest_cmd->add_option("--out", out_file);

  auto* rerun = app.add_subcommand("rerun", "Re-execute the inputs echoed in a report");
  rerun->add_option("--report", report_file)->required()->check(CLI::ExistingFile);
  rerun->add_option("--out", out_file);

  std::vector<const char*> argv{"bullbear"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Json request;
    if (moments->parsed()) {
      std::string resolved = backend;
      if (mode == "exact" && backend == "auto") {
        resolved = is_whole(t_real) && t_real <= kAutoRationalMaxHorizon ? "rational" : "float";
      }
      request = {{"command", "moments"}, {"params", read_json_file(params_file)}, {"t", t_real},
                 {"n_max", n_max},       {"mode", mode}};
      if (mode == "exact") {
        request["backend"] = resolved;
        request["trace"] = trace;
      }
      if (mode == "mc") {
        request["paths"] = paths;
        request["seed"] = seed;
        request["workers"] = workers;
      }
    } else if (simulate->parsed()) {
      request = {{"command", "simulate"}, {"params", read_json_file(params_file)}, {"t", t_int}, {"paths", paths},
                 {"seed", seed},          {"n_max", n_max},                       {"workers", workers}};
    } else if (oracle_cmd->parsed()) {
      request = {{"command", "oracle"}, {"params", read_json_file(params_file)}, {"t", t_int}, {"n", n_max},
                 {"budget", budget}};
    } else if (fit_cmd->parsed()) {
      request = {{"command", "fit"}, {"moments", moments_from_file(moments_file)}, {"g", g}, {"anchor", anchor},
                 {"total", total ? Json(*total) : Json(nullptr)}};
    } else if (ingest_cmd->parsed()) {
      request = {{"command", "ingest"}, {"prices", prices_from_file(prices_file)}, {"stride", stride},
                 {"n_max", n_max}};
    } else {
      const auto report = read_json_file(report_file);
      if (!report.contains("inputs")) throw Error(Errc::parse_error, report_file + ": no inputs to rerun");
      request = report["inputs"];
    }

    const auto report = execute(request);
    if (out_file.empty()) {
      out << report.dump(2) << '\n';
    } else {
      write_json_file(out_file, report);
    }
    return 0;
  } catch (const Error& e) {
    err << "bullbear: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "bullbear: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bullbear::cli
