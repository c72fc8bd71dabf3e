#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "birch/path.hpp"
#include "birch/polynomial.hpp"

namespace birch::cli {

// Exit codes: 0 success, 2 input error, 3 numerical non-convergence.
struct CmdResult {
  int exit_code = 0;
  std::string json_text;  // machine-readable report (stdout / --out)
  std::string summary;    // human summary (stderr)
};

// Scenario pieces shared by the subcommands.
SamplePath path_from_config(const nlohmann::json& cfg, std::uint64_t default_seed);
LiftModel model_from_config(const nlohmann::json& cfg, std::uint64_t default_seed);
PolynomialOneForm one_form_from_config(const nlohmann::json& cfg);

CmdResult cmd_lift(const nlohmann::json& config);
CmdResult cmd_integrate(const nlohmann::json& config);
CmdResult cmd_verify(const nlohmann::json& config, const std::string& suite);
CmdResult cmd_metrics(const nlohmann::json& config);

}  // namespace birch::cli
