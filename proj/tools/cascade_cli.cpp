// Command-line front end: figure-data workflows over the cascade library.

#include "cascade/config.hpp"
#include "cascade/csv.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace cascade;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;  // overrides the config value when set
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key = value config file");
  cmd->add_option("--set", args.overrides, "override one key=value pair");
  cmd->add_option("--output", args.output_dir, "output directory");
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig config;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + args.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    config = parse_config(text.str());
  }
  for (const std::string& assignment : args.overrides) {
    apply_override(config, assignment);
  }
  if (!args.output_dir.empty()) config.output_dir = args.output_dir;
  return config;
}

std::string out_path(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.output_dir);
  return (std::filesystem::path(config.output_dir) / name).string();
}

int hardware_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

int resolve_workers(const RunConfig& config) {
  return config.workers > 0 ? config.workers : hardware_workers();
}

SweepPlan make_plan(const RunConfig& config, ScenarioKind kind) {
  SweepPlan plan;
  plan.pump_grid = config.pump_grid();
  plan.kind = kind;
  plan.n_max = config.n_max;
  plan.cutoffs = config.escalation();
  plan.workers = resolve_workers(config);
  const int threads = std::max(1, hardware_workers() / plan.workers);
  plan.steady = config.steady_options(threads);
  return plan;
}

void write_metadata(const RunConfig& config) {
  write_text_file(out_path(config, "run_config.txt"), config_metadata(config));
}

std::vector<CorrelationRecord> filter_system(
    const std::vector<CorrelationRecord>& records, const std::string& system) {
  std::vector<CorrelationRecord> out;
  for (const CorrelationRecord& r : records) {
    if (r.system == system) out.push_back(r);
  }
  return out;
}

int cmd_sweep(const RunConfig& config) {
  write_metadata(config);
  const SweepPlan plan = make_plan(config, ScenarioKind::Cascaded);
  const std::vector<CorrelationRecord> records =
      run_sweep(plan, config.params);
  emit_records(records, config.n_max, out_path(config, "sweep_records.csv"));

  const auto source = filter_system(records, "source");
  const auto target = filter_system(records, "target");
  emit_transition(source, target, out_path(config, "transition.csv"));

  const CrossingEstimate crossing = transition_analysis(source, target);
  switch (crossing.status) {
    case CrossingEstimate::Found:
      std::cout << "crossing = " << format_number(crossing.pump) << "\n";
      break;
    case CrossingEstimate::NoCrossing:
      std::cout << "crossing = none\n";
      break;
    case CrossingEstimate::Degenerate:
      std::cout << "crossing = degenerate\n";
      break;
  }
  return 0;
}

int cmd_gn_spectrum(RunConfig config, double pump) {
  write_metadata(config);
  const SteadyStateOptions steady = config.steady_options(hardware_workers());

  SystemParams one = config.params;
  one.n_emitters_target = 1;
  SystemParams two = config.params;
  two.n_emitters_target = 2;
  const PointResult r1 = run_point(ScenarioKind::Cascaded, one, pump,
                                   config.escalation(), steady, config.n_max);
  const PointResult r2 = run_point(ScenarioKind::Cascaded, two, pump,
                                   config.escalation(), steady, config.n_max);
  // The cascade is unidirectional, so the source spectrum is the same in
  // both runs; take it from the two-emitter one.
  const CorrelationRecord& source = r2.records[0];
  const CorrelationRecord& target1 = r1.records[1];
  const CorrelationRecord& target2 = r2.records[1];

  std::vector<std::vector<std::string>> rows;
  auto add_system = [&](const std::string& name, auto g_of_n) {
    for (int n = 1; n <= config.n_max; ++n) {
      rows.push_back({name, std::to_string(n), format_number(g_of_n(n))});
    }
  };
  auto from_record = [](const CorrelationRecord& rec) {
    return [&rec](int n) { return n == 1 ? 1.0 : rec.g_of(n); };
  };
  add_system("source", from_record(source));
  add_system("target_1tls", from_record(target1));
  add_system("target_2tls", from_record(target2));
  add_system("thermal", [](int n) {
    return reference_gn(ReferenceKind::thermal(), n);
  });
  add_system("coherent", [](int n) {
    return reference_gn(ReferenceKind::coherent(), n);
  });
  add_system("fock", [](int n) {
    return n == 1 ? 1.0 : reference_gn(ReferenceKind::fock(n), n);
  });
  write_table(out_path(config, "gn_spectrum.csv"), {"system", "n", "g"}, rows);
  std::cout << "source g2 = " << format_number(source.g_of(2))
            << ", target(1) g2 = " << format_number(target1.g_of(2))
            << ", target(2) g2 = " << format_number(target2.g_of(2)) << "\n";
  return 0;
}

int cmd_distribution(RunConfig config, double pump) {
  write_metadata(config);
  const SteadyStateOptions steady = config.steady_options(hardware_workers());
  const PointResult r = run_point(ScenarioKind::Cascaded, config.params, pump,
                                  config.escalation(), steady, config.n_max);
  // The target cavity is the last tensor factor in every scenario build.
  const int slot = r.state.layout.factor_count() - 1;
  const PhotonDistribution dist = photon_distribution(r.state, slot);
  const std::vector<double> coherent =
      coherent_occupation(dist.mean(), dist.cutoff());

  std::vector<std::vector<std::string>> rows;
  for (int n = 0; n <= dist.cutoff(); ++n) {
    rows.push_back({std::to_string(n),
                    format_number(dist.probabilities[n]),
                    format_number(coherent[n])});
  }
  write_table(out_path(config, "distribution.csv"),
              {"n", "p_target", "p_coherent"}, rows);
  std::cout << "mean_n = " << format_number(dist.mean()) << "\n";
  return 0;
}

int cmd_drive_compare(const RunConfig& config) {
  write_metadata(config);
  std::vector<CorrelationRecord> records =
      run_sweep(make_plan(config, ScenarioKind::CoherentDrive), config.params);
  const std::vector<CorrelationRecord> incoherent = run_sweep(
      make_plan(config, ScenarioKind::IncoherentDrive), config.params);
  records.insert(records.end(), incoherent.begin(), incoherent.end());
  emit_records(records, config.n_max, out_path(config, "drive_compare.csv"));
  return 0;
}

int cmd_verify(const RunConfig& config) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    bool ok = true;
    PhotonDistribution th{thermal_occupation(0.5, 40), 0};
    for (int n = 2; n <= 6; ++n) {
      ok = ok && std::abs(g_n(th, n) - reference_gn(ReferenceKind::thermal(), n)) < 1e-4;
    }
    check("thermal reference g^(n) = n!, n = 2..6", ok);
  }
  {
    bool ok = true;
    PhotonDistribution co{coherent_occupation(1.0, 20), 0};
    for (int n = 2; n <= 6; ++n) {
      ok = ok && std::abs(g_n(co, n) - 1.0) < 1e-6;
    }
    check("coherent reference g^(n) = 1, n = 2..6", ok);
  }
  {
    std::vector<double> p(11, 0.0);
    p[4] = 1.0;
    PhotonDistribution fock{p, 0};
    const bool ok =
        reference_gn(ReferenceKind::fock(4), 2) == 0.75 &&
        std::abs(g_n(fock, 2) - 0.75) < 1e-10;
    check("Fock(4) g^(2) = 0.75 on both routes", ok);
  }

  // Independent-solver equivalence on down-scaled systems.
  const struct {
    ScenarioKind kind;
    int emitters;
    const char* name;
  } cases[] = {
      {ScenarioKind::Cascaded, 1, "cascaded 1-emitter"},
      {ScenarioKind::Cascaded, 2, "cascaded 2-emitter"},
      {ScenarioKind::CoherentDrive, 1, "coherent drive"},
      {ScenarioKind::IncoherentDrive, 1, "incoherent drive"},
  };
  for (const auto& c : cases) {
    SystemParams p = config.params;
    p.n_emitters_target = c.emitters;
    p.cutoff_s = 2;
    p.cutoff_t = 2;
    if (c.kind == ScenarioKind::Cascaded) {
      p.pump_source = 0.1;
    } else {
      p.pump_target = 0.1;
    }
    const ScenarioSystem system = build_scenario(c.kind, p);
    const DensityMatrix oracle = steady_state_nullspace(system.spec, 256);
    EvolveOptions opts;
    const EvolutionResult evolved = evolve_to_steady_state(
        system.spec, DensityMatrix::vacuum(system.layout()), opts,
        hardware_workers());
    const double err =
        (oracle.matrix - evolved.final_state.matrix).cwiseAbs().maxCoeff();
    check(std::string("null-space vs RK4, ") + c.name, evolved.converged && err < 1e-6);
  }

  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascaded source-target photon-statistics simulator"};
  app.require_subcommand(1);

  CommonArgs sweep_args, gn_args, dist_args, drive_args, verify_args;
  double gn_pump = 0.1;
  double dist_pump = 0.1;

  CLI::App* sweep = app.add_subcommand(
      "sweep", "pump-rate sweep of the cascaded setup with transition data");
  add_common(sweep, sweep_args);

  CLI::App* gn = app.add_subcommand(
      "gn-spectrum", "g^(n) vs n for source and one-/two-emitter targets");
  add_common(gn, gn_args);
  gn->add_option("--pump", gn_pump, "source pump rate in ps^-1");

  CLI::App* dist = app.add_subcommand(
      "distribution", "target-cavity photon-number distribution");
  add_common(dist, dist_args);
  dist->add_option("--pump", dist_pump, "source pump rate in ps^-1");

  CLI::App* drive = app.add_subcommand(
      "drive-compare", "coherent vs incoherent target drive over a pump grid");
  add_common(drive, drive_args);

  CLI::App* verify = app.add_subcommand(
      "verify", "analytic references and independent-solver cross-checks");
  add_common(verify, verify_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(load_config(sweep_args));
    if (gn->parsed()) return cmd_gn_spectrum(load_config(gn_args), gn_pump);
    if (dist->parsed()) return cmd_distribution(load_config(dist_args), dist_pump);
    if (drive->parsed()) return cmd_drive_compare(load_config(drive_args));
    return cmd_verify(load_config(verify_args));
  } catch (const cascade::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
