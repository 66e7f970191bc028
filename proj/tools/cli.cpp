#include "cli.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sobol_eff/harness.hpp"
#include "sobol_eff/io.hpp"
#include "sobol_eff/models.hpp"

namespace sobol_eff::cli {

namespace {

/// Flags that may also be written as bare `key=value` tokens.
constexpr std::array<std::string_view, 10> kKeyValueFlags = {
    "n", "seed", "reps", "level", "k", "folds", "estimator", "out", "mode", "threads"};

std::vector<std::string> expand_key_value(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  out.reserve(args.size());
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq != std::string::npos && !a.starts_with("-") &&
        std::find(kKeyValueFlags.begin(), kKeyValueFlags.end(),
                  std::string_view(a).substr(0, eq)) != kKeyValueFlags.end()) {
      out.push_back("--" + a);
    } else {
      out.push_back(a);
    }
  }
  return out;
}

/// Comma-separated positive integers, e.g. "500,2000,8000".
std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.empty() || v == 0) {
      throw InvalidArgument("'" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw InvalidArgument("empty list of sample sizes");
  return out;
}

GdRegression parse_estimator(const std::string& name) {
  if (name == "onestep") return GdRegression::knn;
  if (name == "rank") return GdRegression::rank_pairing;
  throw InvalidArgument("unknown estimator '" + name + "' (expected onestep or rank)");
}

/// Writes to the --out file when given, else to `out`.
void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  write(file);
}

void emit_json(const std::string& path, std::ostream& out, const nlohmann::json& j) {
  emit(path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

CsvTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError(0, "cannot open '" + path + "'");
  return read_csv(in);
}

class UnknownModel : public Error {
 public:
  using Error::Error;
};

TestModel resolve_model(const std::string& spec) {
  try {
    return make_model(spec);
  } catch (const InvalidArgument& e) {
    throw UnknownModel(e.what());
  }
}

struct Options {
  std::string input;
  std::string model;
  std::string setting;
  std::string out_path;
  std::string estimator = "onestep";
  std::string mode = "efficiency";
  std::string n_text;
  double level = 0.95;
  std::optional<std::size_t> k;
  std::size_t folds = 2;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::size_t bound_budget = 1'000'000;
  unsigned threads = 0;
};

int cmd_estimate_pf(const Options& o, std::ostream& out) {
  const auto sample = pickfreeze_from_csv(load_table(o.input));
  const auto est = estimate_sobol_pf(sample, ConfidenceConfig{o.level});
  emit_json(o.out_path, out, to_json(est));
  return kOk;
}

int cmd_estimate_gd(const Options& o, std::ostream& out) {
  const CsvTable table = load_table(o.input);
  const std::size_t d = givendata_dimension(table);
  if (table.rows < 4) {
    throw InsufficientData("given-data estimation needs at least 4 rows, found " +
                           std::to_string(table.rows));
  }
  const auto sample = givendata_from_csv(table);
  GdEstimatorConfig cfg;
  cfg.regression = parse_estimator(o.estimator);
  cfg.k = o.k;
  cfg.folds = o.folds;
  cfg.seed = o.seed;
  const auto detail = estimate_sobol_gd_detailed(sample, cfg, ConfidenceConfig{o.level});
  emit_json(o.out_path, out, to_json(detail, d));
  return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const TestModel model = resolve_model(o.model);
  const Setting setting = parse_setting(o.setting);
  const auto sizes = parse_size_list(o.n_text);
  if (sizes.size() != 1) throw InvalidArgument("simulate takes a single --n");
  const ReplicationSeed seed{o.seed, 0};
  if (setting == Setting::pick_freeze) {
    const auto s = sample_pickfreeze(model, sizes.front(), seed);
    emit(o.out_path, out, [&](std::ostream& os) { write_csv(os, s); });
  } else {
    if (sizes.front() < 4) throw InvalidArgument("given-data samples need n >= 4");
    const auto s = sample_givendata(model, sizes.front(), seed);
    emit(o.out_path, out, [&](std::ostream& os) { write_csv(os, s); });
  }
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const TestModel model = resolve_model(o.model);
  EstimatorSpec spec;
  spec.setting = parse_setting(o.setting);
  spec.gd.regression = parse_estimator(o.estimator);
  spec.gd.k = o.k;
  spec.gd.folds = o.folds;
  HarnessOptions opts;
  opts.level = o.level;
  opts.threads = o.threads;
  opts.bound_budget = o.bound_budget;
  const auto sizes = parse_size_list(o.n_text);
  if (o.mode == "efficiency") {
    if (sizes.size() != 1) throw InvalidArgument("efficiency mode takes a single --n");
    const auto rep = run_replications(model, spec, sizes.front(), o.reps, o.seed, opts);
    emit_json(o.out_path, out, to_json(rep));
  } else if (o.mode == "expansion") {
    const auto rep = expansion_check(model, spec, sizes, o.reps, o.seed, opts);
    emit_json(o.out_path, out, to_json(rep));
  } else {
    throw InvalidArgument("unknown mode '" + o.mode + "' (expected efficiency or expansion)");
  }
  return kOk;
}

int cmd_models(std::ostream& out) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& m : builtin_models()) {
    nlohmann::json entry = {{"name", m.name}, {"d", m.d}, {"w_dim", m.w_dim}};
    if (m.truth) {
      entry["s_true"] = m.truth->s_true;
      entry["psi_true"] = m.truth->psi_true;
      entry["mu_true"] = m.truth->mu_true;
      entry["m2_true"] = m.truth->m2_true;
    }
    list.push_back(entry);
  }
  out << nlohmann::json{{"schema_version", kReportSchemaVersion}, {"models", list}}.dump(2)
      << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sobol' index estimation with efficient influence-function variances"};
  app.name("sobol-eff");
  app.require_subcommand(1);
  Options o;

  const auto add_level = [&](CLI::App* sub) {
    sub->add_option("--level", o.level, "Confidence level in (0, 1)")->capture_default_str();
  };
  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", o.out_path, "Output path (default: stdout)");
  };
  const auto add_gd = [&](CLI::App* sub) {
    sub->add_option("--estimator", o.estimator, "Given-data estimator: onestep or rank")
        ->check(CLI::IsMember({"onestep", "rank"}))
        ->capture_default_str();
    sub->add_option("--k", o.k, "kNN neighbor count (default: size-based rule)");
    sub->add_option("--folds", o.folds, "Cross-fitting folds")->capture_default_str();
  };

  auto* pf = app.add_subcommand("estimate-pf", "Pick-Freeze estimate from a y,y_pf CSV");
  pf->add_option("input", o.input, "CSV file with header y,y_pf")->required();
  add_level(pf);
  add_out(pf);

  auto* gd = app.add_subcommand("estimate-gd", "Given-data estimate from an x1,...,xd,y CSV");
  gd->add_option("input", o.input, "CSV file with header x1,...,xd,y")->required();
  add_gd(gd);
  gd->add_option("--seed", o.seed, "Seed of the cross-fitting fold shuffle")
      ->capture_default_str();
  add_level(gd);
  add_out(gd);

  auto* sim = app.add_subcommand("simulate", "Write a sample of a builtin model as CSV");
  sim->add_option("model", o.model, "Model spec, e.g. linear_gaussian:a=1,b=1")->required();
  sim->add_option("setting", o.setting, "pick_freeze or given_data")->required();
  sim->add_option("--n", o.n_text, "Sample size")->required();
  sim->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  add_out(sim);

  auto* ver = app.add_subcommand("verify", "Monte Carlo efficiency or expansion check");
  ver->add_option("model", o.model, "Model spec")->required();
  ver->add_option("setting", o.setting, "pick_freeze or given_data")->required();
  ver->add_option("--mode", o.mode, "efficiency or expansion")->capture_default_str();
  ver->add_option("--n", o.n_text, "Sample size, or comma list for expansion mode")
      ->required();
  ver->add_option("--reps", o.reps, "Replications per sample size (>= 50)")->required();
  ver->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  ver->add_option("--bound-budget", o.bound_budget, "Monte Carlo draws for the bound")
      ->capture_default_str();
  ver->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  add_gd(ver);
  add_level(ver);
  add_out(ver);

  app.add_subcommand("models", "List builtin models and their truths");

  std::vector<std::string> argv = expand_key_value(args);
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (pf->parsed()) return cmd_estimate_pf(o, out);
    if (gd->parsed()) return cmd_estimate_gd(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (ver->parsed()) return cmd_verify(o, out);
    return cmd_models(out);
  } catch (const CsvError& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kMalformedInput;
  } catch (const DegenerateVariance& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const InsufficientData& e) {
    err << "error: " << e.what() << '\n';
    return kInsufficientData;
  } catch (const UnknownModel& e) {
    err << "error: " << e.what() << '\n';
    return kUnknownModel;
  } catch (const MissingTruth& e) {
    err << "error: " << e.what() << '\n';
    return kMissingTruth;
  } catch (const InvalidArgument& e) {
    // Sample-level validation of file contents (non-finite values etc.)
    // surfaces here for the estimate commands.
    err << "error: " << e.what() << '\n';
    return pf->parsed() || gd->parsed() ? kMalformedInput : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace sobol_eff::cli
