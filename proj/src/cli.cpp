#include "birch/cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "birch/integrate.hpp"
#include "birch/json_io.hpp"
#include "birch/pi.hpp"
#include "birch/verify.hpp"

namespace birch::cli {

using nlohmann::json;

namespace {

std::uint64_t seed_of(const json& config) {
  return config.contains("seed") ? config.at("seed").get<std::uint64_t>() : 1;
}

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace

SamplePath path_from_config(const json& cfg, std::uint64_t default_seed) {
  if (cfg.contains("csv")) return parse_csv_file(cfg.at("csv").get<std::string>());
  if (!cfg.contains("generator")) throw InputError("path config needs 'csv' or 'generator'");
  const json& g = cfg.at("generator");
  std::string name = g.at("name").get<std::string>();
  int segments = g.value("segments", 128);
  if (segments < 1 || segments > (1 << 12))
    throw InputError("generator segments must be in 1..4096");
  if (name == "linear") {
    auto x0 = g.at("x0").get<std::vector<double>>();
    auto v = g.at("v").get<std::vector<double>>();
    return gen_linear(x0, v, segments, g.value("T", 1.0));
  }
  if (name == "monomial") {
    return gen_monomial(g.at("exponents").get<std::vector<int>>(), segments, g.value("T", 1.0));
  }
  if (name == "zigzag") {
    return gen_zigzag(g.value("teeth", 1), g.value("amplitude", 1.0), segments);
  }
  if (name == "smooth_random") {
    return gen_smooth(g.value("d", 2), segments, g.value("seed", default_seed),
                      g.value("modes", 3), g.value("amplitude", 1.0));
  }
  throw InputError("unknown path generator '" + name + "'");
}

LiftModel model_from_config(const json& cfg, std::uint64_t default_seed) {
  LiftModel m;
  m.samples = path_from_config(cfg.at("path"), default_seed);
  m.p = cfg.at("p").get<double>();
  m.p_floor = cfg.value("p_floor", static_cast<int>(std::floor(m.p)));
  if (cfg.contains("lift")) {
    const json& lift = cfg.at("lift");
    std::string kind = lift.value("kind", "canonical");
    if (kind == "ito") {
      for (const auto& pj : lift.value("perturbations", json::array())) {
        Perturbation pert;
        pert.i = pj.at("i").get<int>();
        pert.j = pj.at("j").get<int>();
        if (pj.contains("values")) {
          pert.values = pj.at("values").get<std::vector<double>>();
        } else {
          double rate = pj.at("rate").get<double>();
          for (double t : m.samples.times)
            pert.values.push_back(rate * (t - m.samples.times.front()));
        }
        m.perturbations.push_back(std::move(pert));
      }
    } else if (kind != "canonical") {
      throw InputError("unknown lift kind '" + kind + "'");
    }
  }
  m.validate();
  return m;
}

PolynomialOneForm one_form_from_config(const json& cfg) {
  if (cfg.contains("file")) {
    std::ifstream in(cfg.at("file").get<std::string>());
    if (!in) throw InputError("cannot open one-form file");
    std::stringstream ss;
    ss << in.rdbuf();
    return one_form_from_json_text(ss.str());
  }
  return one_form_from_json_text(cfg.dump());
}

namespace {

CmdResult input_error(const std::string& what) {
  CmdResult r;
  r.exit_code = 2;
  r.json_text = json{{"schema_version", kSchemaVersion}, {"error", what}}.dump();
  r.summary = "input error: " + what;
  return r;
}

CmdResult numeric_error(const std::string& what) {
  CmdResult r;
  r.exit_code = 3;
  r.json_text = json{{"schema_version", kSchemaVersion}, {"error", what}}.dump();
  r.summary = "non-convergence: " + what;
  return r;
}

}  // namespace

CmdResult cmd_lift(const json& config) {
  try {
    LiftModel m = model_from_config(config, seed_of(config));
    int refine = config.value("refine", 0);
    long long points = static_cast<long long>(m.samples.segments()) * (1ll << refine) + 1;
    if (points > (1 << 12) + 1) throw InputError("refined grid exceeds 4097 points");
    BranchedRoughPath x = m.build(1 << refine);
    CmdResult r;
    r.json_text = path_to_json(x).dump();
    std::ostringstream os;
    os << "lifted " << x.grid_size() << " grid points, d=" << x.d()
       << ", [p]=" << x.p_floor() << ", pvar=" << p_variation(x, 0, x.grid_size() - 1);
    r.summary = os.str();
    return r;
  } catch (const NonConvergenceError& e) {
    return numeric_error(e.what());
  } catch (const std::exception& e) {
    return input_error(e.what());
  }
}

CmdResult cmd_integrate(const json& config) {
  try {
    std::uint64_t seed = seed_of(config);
    LiftModel m = model_from_config(config, seed);
    PolynomialOneForm f = one_form_from_config(config.at("one_form"));
    f.gamma = config.value("gamma", f.gamma);
    if (!(f.gamma > m.p)) throw InputError("gamma must exceed p");
    double s = m.samples.times.front(), t = m.samples.times.back();
    if (config.contains("interval")) {
      s = config.at("interval").at(0).get<double>();
      t = config.at("interval").at(1).get<double>();
    }
    FullIntegralOpts opts;
    opts.refine.max_levels = config.value("refine", opts.refine.max_levels);
    opts.out_degree = config.value("out_degree", 0);
    FullIntegralResult yres = full_integral(f, m, s, t, opts);

    int out_degree = opts.out_degree > 0 ? opts.out_degree : m.p_floor;
    BranchedRoughPath fine = m.build(1);
    LocalApproximant approx =
        y_tilde(f, fine, fine.index_of_time(s), fine.index_of_time(t), out_degree);

    std::vector<ErrorRow> errors;
    int nseg = m.samples.segments();
    int scales = 0;
    while (scales < 6 && nseg % (1 << (scales + 1)) == 0 && (nseg >> (scales + 1)) >= 1)
      ++scales;
    bool whole = s == m.samples.times.front() && t == m.samples.times.back();
    if (scales >= 1 && whole) {
      FullIntegralOpts eopts = opts;
      eopts.refine.max_levels = std::min(opts.refine.max_levels, 6);
      errors = local_error_report(f, m, scales, eopts);
    }

    BranchedRoughPath ypath;
    ypath.table = yres.y.table();
    ypath.p = m.p;
    ypath.times = yres.base_times;
    ypath.values = yres.y_path;
    double pvar_y = p_variation(ypath, 0, ypath.grid_size() - 1);

    CmdResult r;
    r.json_text = integral_report_json(s, t, yres, approx, errors, pvar_y).dump();
    std::ostringstream os;
    os << "integrated on [" << s << "," << t << "], levels=" << yres.levels_used
       << (yres.converged ? " (cauchy)" : "") << ", |Y|=" << yres.y.norm()
       << ", pvar(Y)=" << pvar_y;
    r.summary = os.str();
    return r;
  } catch (const NonConvergenceError& e) {
    return numeric_error(e.what());
  } catch (const std::exception& e) {
    return input_error(e.what());
  }
}

CmdResult cmd_verify(const json& config, const std::string& suite) {
  try {
    std::uint64_t seed = seed_of(config);
    int instances = config.value("instances", 100);
    std::vector<CheckResult> checks;
    if (suite == "algebra") {
      checks = verify_algebra(seed, instances);
    } else if (suite == "analysis") {
      checks = verify_analysis(seed);
    } else if (suite == "pi") {
      checks = verify_pi(seed);
    } else {
      return input_error("unknown verify suite '" + suite + "'");
    }
    json arr = json::array();
    for (const auto& c : checks)
      arr.push_back(
          {{"name", c.name}, {"pass", c.pass}, {"metric", c.metric}, {"detail", c.detail}});
    bool passed = all_pass(checks);
    CmdResult r;
    r.exit_code = passed ? 0 : 1;
    r.json_text =
        json{{"schema_version", kSchemaVersion}, {"suite", suite}, {"passed", passed},
             {"checks", arr}}
            .dump();
    std::ostringstream os;
    os << "suite " << suite << ": " << (passed ? "all checks passed" : "FAILURES") << " ("
       << checks.size() << " checks)";
    r.summary = os.str();
    return r;
  } catch (const std::exception& e) {
    return input_error(e.what());
  }
}

CmdResult cmd_metrics(const json& config) {
  try {
    std::uint64_t seed = seed_of(config);
    double p = config.at("p").get<double>();
    auto scenario = [&](const json& sub) {
      json cfg = sub;
      cfg["p"] = p;
      if (config.contains("p_floor")) cfg["p_floor"] = config.at("p_floor");
      return model_from_config(cfg, seed);
    };
    LiftModel m1 = scenario(config.at("x1"));
    LiftModel m2 = scenario(config.at("x2"));
    BranchedRoughPath x1 = m1.build(1);
    BranchedRoughPath x2 = m2.build(1);
    double pv1 = p_variation(x1, 0, x1.grid_size() - 1);
    double pv2 = p_variation(x2, 0, x2.grid_size() - 1);
    double dp = dp_metric(x1, x2);
    CmdResult r;
    r.json_text = json{{"schema_version", kSchemaVersion},
                       {"pvar1", pv1},
                       {"pvar2", pv2},
                       {"dp", dp}}
                      .dump();
    std::ostringstream os;
    os << "pvar1=" << pv1 << " pvar2=" << pv2 << " dp=" << dp;
    r.summary = os.str();
    return r;
  } catch (const std::exception& e) {
    return input_error(e.what());
  }
}

}  // namespace birch::cli
