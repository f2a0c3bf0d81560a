// hardcore: command line front end for exact computations, sampling and
// disorder sweeps. CSV goes to --out (default standard output); a file output
// also gets a <out>.json manifest.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "hardcore/errors.hpp"
#include "hardcore/experiments.hpp"
#include "hardcore/validation.hpp"

namespace {

enum ExitCode { kOk = 0, kChecksFailed = 1, kUsage = 2, kCapacity = 3, kRuntime = 4 };

std::pair<int, int> parse_box(const std::string& text) {
  const auto x = text.find('x');
  std::size_t used_w = 0, used_h = 0;
  if (x == std::string::npos) throw std::invalid_argument("--box expects WxH, got " + text);
  try {
    const int w = std::stoi(text.substr(0, x), &used_w);
    const int h = std::stoi(text.substr(x + 1), &used_h);
    if (used_w == x && used_h == text.size() - x - 1) return {w, h};
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("--box expects WxH, got " + text);
}

hardcore::Site parse_site(const std::string& text) {
  const auto c = text.find(',');
  if (c == std::string::npos) throw std::invalid_argument("--origin expects X,Y, got " + text);
  return {std::stoi(text.substr(0, c)), std::stoi(text.substr(c + 1))};
}

void apply_env_seed(hardcore::ExperimentConfig& cfg) {
  const char* env = std::getenv("HARDCORE_SEED");
  if (env == nullptr || *env == '\0') return;
  std::size_t used = 0;
  const std::string text(env);
  const auto seed = std::stoull(text, &used);
  if (used != text.size()) throw std::invalid_argument("HARDCORE_SEED is not an unsigned integer");
  cfg.seed = seed;
}

void emit(const hardcore::ExperimentConfig& cfg, const std::vector<hardcore::ExperimentRecord>& records) {
  if (cfg.out == "-") {
    hardcore::write_csv(std::cout, records);
    return;
  }
  std::ofstream csv(cfg.out, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open " + cfg.out);
  hardcore::write_csv(csv, records);
  std::ofstream manifest(cfg.out + ".json", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot open " + cfg.out + ".json");
  manifest << hardcore::manifest_json(cfg);
  if (cfg.command == "logz") std::cout << hardcore::format_number(records.front().value) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-core lattice gas with random activities: exact engine, samplers and disorder sweeps"};
  app.set_version_flag("--version", std::string("hardcore ") + hardcore::kToolVersion);
  app.require_subcommand(1);

  hardcore::ExperimentConfig cfg;
  std::string box, origin, bc = "free";
  int j = 0, L = 0;
  bool inject_bug = false;

  auto out_opts = [&](CLI::App* s) {
    s->add_option("--seed", cfg.seed, "master seed (HARDCORE_SEED overrides)")->capture_default_str();
    s->add_option("--out", cfg.out, "CSV path, - for standard output")->capture_default_str();
  };
  auto workers = [&](CLI::App* s) {
    s->add_option("--workers", cfg.workers, "worker threads")->capture_default_str()->check(CLI::Range(1U, 256U));
  };
  auto single_field = [&](CLI::App* s) {
    s->add_option("--box", box, "box size WxH");
    s->add_option("--origin", origin, "lower-left corner X,Y of --box (default 0,0)");
    s->add_option("--j", j, "use the box Lambda_j = [-j+1, j]^2");
    s->add_option("--lambda", cfg.lambda, "global activity scale")->capture_default_str();
    s->add_option("--bc", bc, "boundary condition")->check(CLI::IsMember({"free", "empty", "even", "odd"}))
        ->capture_default_str();
    s->add_option("--field", cfg.field, "disorder spec sampled on the box")->capture_default_str();
    s->add_option("--field-file", cfg.field_file, "JSON field file (overrides --field and --lambda)");
    out_opts(s);
  };
  auto method = [&](CLI::App* s) {
    s->add_option("--method", cfg.method, "exact or cftp")->check(CLI::IsMember({"exact", "cftp"}))
        ->capture_default_str();
    s->add_option("--replicas", cfg.replicas, "number of draws")->capture_default_str();
    workers(s);
  };
  auto disorder = [&](CLI::App* s) {
    s->add_option("--disorder", cfg.disorder,
                  "constant:c | bernoulli:p | uniform:a,b | lognormal:m,s | gamma:k,t | pareto:a,xmin")
        ->capture_default_str();
    s->add_option("--lambda", cfg.lambda, "global activity scale")->capture_default_str();
    s->add_option("--replicas", cfg.replicas, "disorder replicas")->capture_default_str();
    workers(s);
    out_opts(s);
  };

  auto* logz = app.add_subcommand("logz", "log partition function of one field");
  single_field(logz);
  auto* occupation = app.add_subcommand("occupation", "occupation probabilities of every site");
  single_field(occupation);
  method(occupation);
  auto* sample = app.add_subcommand("sample", "draw configurations");
  single_field(sample);
  method(sample);

  auto* influence = app.add_subcommand("influence", "even minus odd boundary gap at the origin");
  disorder(influence);
  influence->add_option("--sides", cfg.sides, "even side lengths of Lambda_{side/2}")->delimiter(',')
      ->capture_default_str();

  auto* free_energy = app.add_subcommand("free-energy", "G^e - G^o per replica with annulus and c' bounds");
  disorder(free_energy);
  free_energy->add_option("--j", j, "inner box Lambda_j")->required();
  free_energy->add_option("--L", L, "outer box Lambda_L")->required();
  free_energy->add_option("--field-file", cfg.field_file, "fixed field inside Lambda_j");

  auto* fluctuations = app.add_subcommand("fluctuations", "variance of G^e - G^o against |Lambda_j|");
  disorder(fluctuations);
  fluctuations->add_option("--jvalues", cfg.j_values, "inner box indices")->delimiter(',')->capture_default_str();
  fluctuations->add_option("--L-scale", cfg.L_scale, "L = scale * j + offset")->capture_default_str();
  fluctuations->add_option("--L-offset", cfg.L_offset, "L = scale * j + offset")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "run the acceptance checks");
  workers(validate);
  validate->add_flag("--inject-engine-bug", inject_bug, "validate a deliberately broken engine (self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (validate->parsed()) {
      hardcore::ValidationOptions opts;
      opts.workers = cfg.workers;
      if (inject_bug) opts.engine = hardcore::EngineHooks::off_by_one();
      bool ok = true;
      for (int id = 1; id <= hardcore::kCheckCount; ++id) {
        const auto r = hardcore::run_check(id, opts);
        std::cout << hardcore::format_check(r) << std::endl;
        ok = ok && r.passed;
      }
      return ok ? kOk : kChecksFailed;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (!box.empty()) cfg.box_size = parse_box(box);
    if (!origin.empty()) cfg.origin = parse_site(origin);
    if (j != 0) cfg.j = j;
    if (L != 0) cfg.L = L;
    cfg.bc = hardcore::parse_boundary_kind(bc);
    apply_env_seed(cfg);
    emit(cfg, hardcore::run_experiment(cfg));
    return kOk;
  } catch (const hardcore::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCapacity;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
