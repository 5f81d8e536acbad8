#include "jamflow_cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "jamflow/api_solver.hpp"
#include "jamflow/evaluate.hpp"
#include "jamflow/exact_solver.hpp"
#include "jamflow/finite_mdp.hpp"
#include "jamflow/scenario.hpp"
#include "jamflow/version.hpp"

namespace jamflow::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Everything a subcommand needs after parsing. Overrides are recorded so
// output files state exactly what was run; nothing here depends on the
// clock, so reruns are byte-identical.
struct Invocation {
  std::string scenario_ref;
  std::string out;
  std::string history_out = "history.csv";
  std::string dump_mdp;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double cost = 0.0;
  bool cost_set = false;
  double success_rate = 1.0;
  bool success_set = false;
  int iterations = 100;
  int horizon = 100;
  int trajectories = 50;
  int states = 32;
  std::string policy = "no_attack";
  std::string weights_path;
  int dos_segment = 1;  // 1-based on the command line
  double dos_fraction = 0.0;
  bool dos_fraction_set = false;
  double queue_step = 25.0;
  double queue_max = 75.0;
  double admission_step = 0.25;
  double tolerance = 1e-9;
  std::string costs_text;

  ScenarioConfig scenario{};
  std::uint64_t effective_seed = 0;

  void resolve() {
    scenario = resolve_scenario(scenario_ref);
    if (cost_set) scenario.reward.cost_coefficient = cost;
    if (success_set) scenario.success_probability = success_rate;
    validate_scenario(scenario);
    effective_seed = seed_set ? seed : scenario.seed;
  }

  std::string overrides() const {
    std::string text;
    if (cost_set) text += " cost=" + fmt(cost);
    if (success_set) text += " success_rate=" + fmt(success_rate);
    return text.empty() ? "none" : text.substr(1);
  }

  DiscretizationGrid grid() const {
    return DiscretizationGrid{queue_step, queue_max, admission_step};
  }
};

void add_common_flags(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--scenario", inv.scenario_ref,
                  "Scenario file path or bundled name (system1..system3)")
      ->required();
  cmd->add_option("--seed", inv.seed,
                  "Root seed; defaults to the scenario's seed")
      ->trigger_on_parse();
  cmd->add_option("--cost", inv.cost, "Override the attack cost coefficient")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--success-rate", inv.success_rate,
                  "Override the jam success probability")
      ->check(CLI::Range(0.0, 1.0));
}

void add_rollout_flags(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--horizon", inv.horizon, "Steps per trajectory")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--trajectories", inv.trajectories,
                  "Trajectories per start state")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_policy_flags(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--policy", inv.policy,
                  "Policy to run: no_attack, random, myopic, dos, api, "
                  "tabular")
      ->check(CLI::IsMember(
          {"no_attack", "random", "myopic", "dos", "api", "tabular"}))
      ->capture_default_str();
  cmd->add_option("--weights", inv.weights_path,
                  "Weights file for --policy api");
  cmd->add_option("--dos-segment", inv.dos_segment,
                  "1-based segment for --policy dos")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--dos-fraction", inv.dos_fraction,
                  "Jam fraction for --policy dos; defaults to the "
                  "scenario's first fraction");
}

void add_grid_flags(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--queue-step", inv.queue_step, "Queue grid step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--queue-max", inv.queue_max, "Queue grid maximum")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--admission-step", inv.admission_step,
                  "Admission grid step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

void write_metadata(std::ostream& out, const std::string& command,
                    const Invocation& inv,
                    const std::vector<std::string>& extra = {}) {
  out << "# jamflow " << kVersion << '\n';
  out << "# command: " << command << '\n';
  out << "# scenario: " << inv.scenario.name << '\n';
  out << "# seed: " << inv.effective_seed << '\n';
  out << "# overrides: " << inv.overrides() << '\n';
  for (const auto& line : extra) out << "# " << line << '\n';
}

RolloutPlan make_plan(const Invocation& inv) {
  RolloutPlan plan;
  plan.trajectories_per_state = inv.trajectories;
  plan.horizon = inv.horizon;
  Rng rep_rng(derive_seed(inv.effective_seed, "rep-states"));
  plan.representative_states = representative_states(inv.scenario, rep_rng);
  return plan;
}

// Builds the policy named on the command line. Training artifacts (tabular
// solve) run here so evaluate/histogram can score any policy kind.
std::pair<PolicyFn, std::string> build_policy(const Invocation& inv) {
  const std::string& name = inv.policy;
  if (name == "no_attack")
    return {make_policy(PolicyHandle::no_attack(), inv.scenario), name};
  if (name == "random")
    return {make_policy(PolicyHandle::random(), inv.scenario), name};
  if (name == "myopic")
    return {make_policy(PolicyHandle::myopic(), inv.scenario), name};
  if (name == "dos") {
    const double fraction = inv.dos_fraction_set
                                ? inv.dos_fraction
                                : inv.scenario.jam_fractions.at(0);
    const PolicyHandle handle =
        PolicyHandle::dos(inv.dos_segment - 1, fraction);
    return {make_policy(handle, inv.scenario), handle.name()};
  }
  if (name == "api") {
    if (inv.weights_path.empty())
      throw std::invalid_argument("--policy api requires --weights");
    const PolicyHandle handle =
        PolicyHandle::api_greedy(load_weights(inv.weights_path));
    return {make_policy(handle, inv.scenario), handle.name()};
  }
  // tabular: exact solve on the configured grid, then greedy table lookup.
  auto mdp = std::make_shared<FiniteMdp>(
      build_finite_mdp(inv.scenario, inv.grid()));
  PolicyVector initial(mdp->state_count(), 0);
  PolicyIterationResult solved = policy_iteration(*mdp, initial);
  const PolicyHandle handle =
      PolicyHandle::tabular(std::move(mdp), std::move(solved.policy));
  return {make_policy(handle, inv.scenario), handle.name()};
}

int cmd_solve_exact(const Invocation& inv) {
  const FiniteMdp mdp = build_finite_mdp(inv.scenario, inv.grid());
  PolicyVector initial(mdp.state_count(), 0);
  const PolicyIterationResult pi = policy_iteration(mdp, initial);
  const std::vector<double> vi = value_iteration(mdp, inv.tolerance);
  const PolicyVector vi_policy = policy_improvement(mdp, vi);

  double gap = 0.0;
  for (std::size_t s = 0; s < vi.size(); ++s)
    gap = std::max(gap, std::abs(pi.values[s] - vi[s]));

  if (!inv.dump_mdp.empty()) {
    std::ofstream dump = open_out(inv.dump_mdp);
    dump_finite_mdp(mdp, dump);
    if (!dump) throw std::runtime_error(inv.dump_mdp + ": write failed");
  }

  std::ofstream out = open_out(inv.out);
  write_metadata(out, "solve-exact", inv,
                 {"grid: queue_step=" + fmt(inv.queue_step) +
                      " queue_max=" + fmt(inv.queue_max) +
                      " admission_step=" + fmt(inv.admission_step),
                  "tolerance: " + fmt(inv.tolerance),
                  "policy_iteration_rounds: " + std::to_string(pi.iterations),
                  "sup_value_gap: " + fmt(gap)});
  out << "state,q1,q2,alpha1,value_pi,value_vi,action\n";
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    const SystemState& state = mdp.states[s];
    out << s << ',' << fmt(state.queues[0]) << ',' << fmt(state.queues[1])
        << ',' << fmt(state.admission[0]) << ',' << fmt(pi.values[s]) << ','
        << fmt(vi[s]) << ','
        << mdp.actions[static_cast<std::size_t>(pi.policy[s])].name() << '\n';
  }
  if (!out) throw std::runtime_error(inv.out + ": write failed");

  const bool same_policy = pi.policy == vi_policy;
  std::cout << "solve-exact: " << mdp.state_count() << " states, "
            << mdp.actions.size() << " actions, sup|J_pi - J_vi| = "
            << fmt(gap) << ", greedy policies "
            << (same_policy ? "match" : "differ") << ", wrote " << inv.out
            << '\n';
  return 0;
}

int cmd_train_api(const Invocation& inv) {
  const RolloutPlan plan = make_plan(inv);
  const ApiResult result =
      run_api(inv.scenario, plan, inv.iterations, inv.effective_seed);

  std::vector<std::string> headers = {
      std::string("jamflow ") + kVersion,
      "command: train-api",
      "scenario: " + inv.scenario.name,
      "seed: " + std::to_string(inv.effective_seed),
      "overrides: " + inv.overrides(),
      "iterations: " + std::to_string(inv.iterations),
      "horizon: " + std::to_string(inv.horizon),
      "trajectories: " + std::to_string(inv.trajectories),
      "best_reward: " + fmt(result.best_reward)};
  save_weights(result.best_weights, inv.out, headers);

  std::ofstream hist = open_out(inv.history_out);
  write_metadata(hist, "train-api", inv,
                 {"iterations: " + std::to_string(inv.iterations),
                  "horizon: " + std::to_string(inv.horizon),
                  "trajectories: " + std::to_string(inv.trajectories)});
  hist << "iteration,eval_reward,best_reward\n";
  for (const auto& row : result.history)
    hist << row.iteration << ',' << fmt(row.eval_reward) << ','
         << fmt(row.best_reward) << '\n';
  if (!hist) throw std::runtime_error(inv.history_out + ": write failed");

  std::cout << "train-api: " << inv.iterations << " iterations, best held-out reward "
            << fmt(result.best_reward) << ", wrote " << inv.out << " and "
            << inv.history_out << '\n';
  return 0;
}

int cmd_evaluate(const Invocation& inv) {
  auto [policy, policy_name] = build_policy(inv);
  const std::vector<SystemState> starts = held_out_states(
      inv.scenario, inv.effective_seed, static_cast<std::size_t>(inv.states));
  const EvaluationReport report =
      evaluate_policy(policy, policy_name, inv.scenario, starts, inv.horizon,
                      inv.trajectories, inv.effective_seed);

  std::ofstream out = open_out(inv.out);
  write_metadata(out, "evaluate", inv,
                 {"held_out_states: " + std::to_string(inv.states),
                  "horizon: " + std::to_string(inv.horizon),
                  "trajectories: " + std::to_string(inv.trajectories)});
  out << "scenario,policy,mean_reward,stderr,states,trajectories,horizon,"
         "seed\n";
  out << report.scenario << ',' << report.policy << ','
      << fmt(report.mean_reward) << ',' << fmt(report.standard_error) << ','
      << report.states << ',' << report.trajectories_per_state << ','
      << report.horizon << ',' << report.seed << '\n';
  if (!out) throw std::runtime_error(inv.out + ": write failed");

  std::cout << "evaluate: policy " << report.policy << " mean_reward "
            << fmt(report.mean_reward) << " stderr "
            << fmt(report.standard_error) << ", wrote " << inv.out << '\n';
  return 0;
}

int cmd_sweep(const Invocation& inv) {
  std::vector<double> costs = {0.06, 0.125, 0.25, 0.5, 0.75, 1.0, 2.0};
  if (!inv.costs_text.empty()) {
    costs.clear();
    std::stringstream ss(inv.costs_text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        costs.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw std::invalid_argument("--costs: cannot parse '" + part + "'");
      }
      if (costs.back() < 0.0)
        throw std::invalid_argument("--costs: negative cost");
    }
    if (costs.empty()) throw std::invalid_argument("--costs: empty list");
  }

  SweepOptions options;
  options.api_iterations = inv.iterations;
  options.horizon = inv.horizon;
  options.trajectories_per_state = inv.trajectories;
  options.held_out_count = static_cast<std::size_t>(inv.states);
  const std::vector<PolicyHandle> policies =
      default_policy_set(inv.scenario);
  const std::vector<SweepRow> rows = sweep_costs(
      inv.scenario, costs, policies, options, inv.effective_seed);

  std::ofstream out = open_out(inv.out);
  write_metadata(out, "sweep", inv,
                 {"iterations: " + std::to_string(inv.iterations),
                  "horizon: " + std::to_string(inv.horizon),
                  "trajectories: " + std::to_string(inv.trajectories),
                  "held_out_states: " + std::to_string(inv.states)});
  out << "scenario,cost,policy,mean_reward,stderr,seed\n";
  for (const auto& row : rows)
    out << inv.scenario.name << ',' << fmt(row.cost) << ',' << row.policy
        << ',' << fmt(row.mean_reward) << ',' << fmt(row.standard_error)
        << ',' << inv.effective_seed << '\n';
  if (!out) throw std::runtime_error(inv.out + ": write failed");

  std::cout << "sweep: " << costs.size() << " cost points x "
            << policies.size() << " policies, wrote " << inv.out << '\n';
  return 0;
}

int cmd_histogram(const Invocation& inv) {
  auto [policy, policy_name] = build_policy(inv);
  const std::vector<SystemState> starts = held_out_states(
      inv.scenario, inv.effective_seed, static_cast<std::size_t>(inv.states));
  const std::vector<HistogramRow> rows =
      action_histogram(policy, inv.scenario, starts, inv.horizon,
                       inv.trajectories, inv.effective_seed);

  std::ofstream out = open_out(inv.out);
  write_metadata(out, "histogram", inv,
                 {"held_out_states: " + std::to_string(inv.states),
                  "horizon: " + std::to_string(inv.horizon),
                  "trajectories: " + std::to_string(inv.trajectories)});
  out << "scenario,cost,policy,action,frequency\n";
  for (const auto& row : rows)
    out << inv.scenario.name << ','
        << fmt(inv.scenario.reward.cost_coefficient) << ',' << policy_name
        << ',' << row.action.name() << ',' << fmt(row.frequency) << '\n';
  if (!out) throw std::runtime_error(inv.out + ": write failed");

  std::cout << "histogram: policy " << policy_name << " over "
            << rows.size() << " actions, wrote " << inv.out << '\n';
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Adversarial sensor-jamming policies for a two-road traffic "
               "diverge"};
  app.require_subcommand(1);

  Invocation inv;

  CLI::App* solve = app.add_subcommand(
      "solve-exact", "Solve the discretized model exactly and dump values");
  add_common_flags(solve, inv);
  add_grid_flags(solve, inv);
  solve->add_option("--tolerance", inv.tolerance,
                    "Value-iteration accuracy target")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--dump-mdp", inv.dump_mdp,
                    "Also write the finite model as text");
  inv.out = "values.csv";
  solve->add_option("--out", inv.out, "Output CSV path")
      ->capture_default_str();

  CLI::App* train = app.add_subcommand(
      "train-api", "Train an approximate-policy-iteration attack policy");
  add_common_flags(train, inv);
  add_rollout_flags(train, inv);
  train->add_option("--iterations", inv.iterations, "Training iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--out", inv.out, "Weights file path")
      ->default_str("weights.txt");
  train->add_option("--history", inv.history_out,
                    "Training history CSV path")
      ->capture_default_str();

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score a policy on held-out start states");
  add_common_flags(evaluate, inv);
  add_rollout_flags(evaluate, inv);
  add_policy_flags(evaluate, inv);
  add_grid_flags(evaluate, inv);
  evaluate->add_option("--states", inv.states, "Held-out start states")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--out", inv.out, "Output CSV path")
      ->default_str("report.csv");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Compare the policy set across attack cost coefficients");
  add_common_flags(sweep, inv);
  add_rollout_flags(sweep, inv);
  sweep->add_option("--iterations", inv.iterations,
                    "Training iterations per cost point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--costs", inv.costs_text,
                    "Comma-separated cost coefficients (default "
                    "0.06,0.125,0.25,0.5,0.75,1,2)");
  sweep->add_option("--states", inv.states, "Held-out start states")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--out", inv.out, "Output CSV path")
      ->default_str("sweep.csv");

  CLI::App* histogram = app.add_subcommand(
      "histogram", "Action frequencies of a policy over evaluation runs");
  add_common_flags(histogram, inv);
  add_rollout_flags(histogram, inv);
  add_policy_flags(histogram, inv);
  add_grid_flags(histogram, inv);
  histogram->add_option("--states", inv.states, "Held-out start states")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  histogram->add_option("--out", inv.out, "Output CSV path")
      ->default_str("histogram.csv");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // CLI11 only records flags that were passed; note which overrides apply.
  CLI::App* cmd = app.get_subcommands().front();
  inv.seed_set = cmd->count("--seed") > 0;
  inv.cost_set = cmd->count("--cost") > 0;
  inv.success_set = cmd->count("--success-rate") > 0;
  if (cmd == evaluate || cmd == histogram)
    inv.dos_fraction_set = cmd->count("--dos-fraction") > 0;
  if (cmd == train && cmd->count("--out") == 0) inv.out = "weights.txt";
  if (cmd == evaluate && cmd->count("--out") == 0) inv.out = "report.csv";
  if (cmd == sweep && cmd->count("--out") == 0) inv.out = "sweep.csv";
  if (cmd == histogram && cmd->count("--out") == 0) inv.out = "histogram.csv";

  try {
    inv.resolve();
    if (cmd == solve) return cmd_solve_exact(inv);
    if (cmd == train) return cmd_train_api(inv);
    if (cmd == evaluate) return cmd_evaluate(inv);
    if (cmd == sweep) return cmd_sweep(inv);
    return cmd_histogram(inv);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << " (scenario " << inv.scenario_ref
              << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << " (scenario " << inv.scenario_ref
              << ", seed " << inv.effective_seed << ")\n";
    return 4;
  }
}

}  // namespace jamflow::cli
