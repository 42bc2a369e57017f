// Command line front end for the mvtraffic library.
//
// Exit codes: 0 success, 1 runtime failure (I/O, validation, simulation),
// 2 usage error, 3 fit finished without converging.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvtraffic/estimation.hpp"
#include "mvtraffic/netsim.hpp"
#include "mvtraffic/rng.hpp"
#include "mvtraffic/stats.hpp"
#include "mvtraffic/synthesis.hpp"
#include "mvtraffic/trace_io.hpp"
#include "mvtraffic/viewswitch.hpp"

namespace {

using namespace mvtraffic;

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string field =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (field.empty()) {
      throw std::runtime_error(std::string(what) + ": empty entry in list");
    }
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || std::isnan(v)) {
      throw std::runtime_error(std::string(what) + ": cannot parse '" + field + "'");
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct FitArgs {
  std::string trace_path;
  std::string structure_path;
  std::string out_model;
  std::string report_path;
  int states = 3;
  double ll_threshold = 0.01;
  int max_iters = 200;
  double pmf_floor = 1e-12;
  long max_duration = 0;
  std::uint64_t seed = 0;
};

int run_fit(const FitArgs& args) {
  const GopStructure structure = read_structure(args.structure_path);
  const Trace trace = read_trace(args.trace_path, structure);

  FitConfig config;
  config.num_states = args.states;
  config.ll_threshold = args.ll_threshold;
  config.max_iters = args.max_iters;
  config.pmf_floor = args.pmf_floor;
  config.trellis.max_duration = args.max_duration;
  config.rng_seed = args.seed;

  const FitReport report = fit(trace, config);
  write_model(report.params, structure, args.out_model);
  if (!args.report_path.empty()) {
    write_fit_report_csv(report, args.report_path);
  }

  const double final_ll =
      report.log_likelihoods.empty() ? 0.0 : report.log_likelihoods.back();
  if (!report.converged) {
    std::cerr << "fit did not converge within " << report.iterations
              << " iterations (last log likelihood " << format_double(final_ll)
              << "); model written anyway\n";
    return 3;
  }
  std::cout << "converged after " << report.iterations << " iterations, log likelihood "
            << format_double(final_ll) << "\n";
  return 0;
}

struct GenerateArgs {
  std::string model_path;
  std::string out_trace;
  long gops = 0;
  std::uint64_t seed = 0;
};

int run_generate(const GenerateArgs& args) {
  const auto [params, structure] = read_model(args.model_path);
  const Trace trace = generate_trace(params, structure, args.gops, args.seed);
  write_trace(trace, args.out_trace);
  std::cout << "wrote " << trace.size() << " GOPs (" << structure.frames_per_gop()
            << " frames each) to " << args.out_trace << "\n";
  return 0;
}

struct StatsArgs {
  std::string trace_a;
  std::string trace_b;
  std::string structure_path;
  std::string out_prefix;
  int view = -1;
  long max_lag = 0;  // 0: min(100, length-1)
  int qq_points_count = 99;
};

void print_summary(const char* name, const std::vector<double>& series) {
  const SeriesSummary s = summarize(series);
  std::cout << name << ": frames=" << series.size() << " mean=" << format_double(s.mean)
            << " std=" << format_double(s.stddev) << " min=" << format_double(s.min)
            << " max=" << format_double(s.max)
            << " peak_to_mean=" << format_double(s.peak_to_mean) << "\n";
}

int run_stats(const StatsArgs& args) {
  std::optional<GopStructure> structure;
  if (!args.structure_path.empty()) structure = read_structure(args.structure_path);

  auto load = [&](const std::string& path) {
    return structure ? read_trace(path, *structure) : read_trace(path);
  };
  const Trace a = load(args.trace_a);
  const std::vector<double> series_a = a.frame_size_series(args.view);
  print_summary("trace_a", series_a);

  const long lag_a = args.max_lag > 0
                         ? args.max_lag
                         : std::min<long>(100, static_cast<long>(series_a.size()) - 1);
  write_acf_csv(acf(series_a, lag_a), args.out_prefix + "acf_a.csv");

  if (!args.trace_b.empty()) {
    const Trace b = load(args.trace_b);
    const std::vector<double> series_b = b.frame_size_series(args.view);
    print_summary("trace_b", series_b);
    const long lag_b = args.max_lag > 0
                           ? args.max_lag
                           : std::min<long>(100, static_cast<long>(series_b.size()) - 1);
    write_acf_csv(acf(series_b, lag_b), args.out_prefix + "acf_b.csv");
    write_qq_csv(qq_points(series_a, series_b, args.qq_points_count),
                 args.out_prefix + "qq.csv");
  }
  return 0;
}

struct VsmArgs {
  std::string params_path;
  std::string out_schedule;
  double horizon_s = 0.0;
  std::uint64_t seed = 0;
};

int run_vsm(const VsmArgs& args) {
  const VsmParams params = read_vsm(args.params_path);
  const ViewSchedule schedule = generate_schedule(params, args.horizon_s, args.seed);
  write_schedule_csv(schedule, args.out_schedule);
  std::cout << "wrote " << schedule.segments.size() << " segments covering "
            << format_double(schedule.horizon_s) << " s to " << args.out_schedule << "\n";
  return 0;
}

struct SimulateArgs {
  std::string source;  // "trace" or "model"
  std::string trace_path;
  std::string structure_path;
  std::string model_path;
  long gops = 3000;
  std::string mode = "multiview";
  std::string vsm_path;
  std::string config_path;
  std::string sweep;  // "", "sender", "receiver"
  std::string buffer_list;
  std::string rate_ratios = "2";
  int runs = 0;           // 0: keep the config value
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_path;
};

int run_simulate(const SimulateArgs& args) {
  SimConfig base = args.config_path.empty() ? SimConfig{} : read_sim_config(args.config_path);
  if (args.runs > 0) base.monte_carlo_runs = args.runs;
  if (args.seed_given) base.seed = Rng::derive_seed(args.seed, 1);

  Trace trace;
  if (args.source == "trace") {
    if (args.trace_path.empty()) {
      throw std::runtime_error("simulate: --trace is required with --source trace");
    }
    trace = args.structure_path.empty()
                ? read_trace(args.trace_path)
                : read_trace(args.trace_path, read_structure(args.structure_path));
  } else if (args.source == "model") {
    if (args.model_path.empty()) {
      throw std::runtime_error("simulate: --model is required with --source model");
    }
    const auto [params, structure] = read_model(args.model_path);
    trace = generate_trace(params, structure, args.gops, Rng::derive_seed(args.seed, 0));
  } else {
    throw std::runtime_error("simulate: --source must be 'trace' or 'model'");
  }

  std::optional<ViewSchedule> schedule;
  if (args.mode == "interactive") {
    if (args.vsm_path.empty()) {
      throw std::runtime_error("simulate: --vsm is required with --mode interactive");
    }
    const VsmParams vsm = read_vsm(args.vsm_path);
    const double horizon =
        static_cast<double>(trace.size()) * trace.structure.gop_len / trace.structure.fps;
    schedule = generate_schedule(vsm, horizon, Rng::derive_seed(args.seed, 2));
  } else if (args.mode != "multiview") {
    throw std::runtime_error("simulate: --mode must be 'multiview' or 'interactive'");
  }

  const std::vector<double> ratios = parse_double_list(args.rate_ratios, "--rate-ratios");
  std::vector<double> buffers;
  if (!args.sweep.empty()) {
    if (args.sweep != "sender" && args.sweep != "receiver") {
      throw std::runtime_error("simulate: --sweep must be 'sender' or 'receiver'");
    }
    if (args.buffer_list.empty()) {
      throw std::runtime_error("simulate: --buffer-list is required with --sweep");
    }
    buffers = parse_double_list(args.buffer_list, "--buffer-list");
    for (double b : buffers) {
      if (!(b > 0.0)) throw std::runtime_error("--buffer-list: sizes must be > 0");
    }
  } else {
    buffers.push_back(base.receiver_buffer_bits);  // single point, config as given
  }

  std::ofstream out(args.out_path);
  if (!out) throw std::runtime_error(args.out_path + ": cannot open for writing");
  out << "mode,sweep,rate_ratio,channel_rate_bps,buffer_bits,sender_buffer_bits,run,"
         "offered,sender_dropped,channel_lost,late,overflow,"
         "sender_loss,playout_loss,overall_loss\n";

  const std::string sweep_name = args.sweep.empty() ? "none" : args.sweep;
  for (double ratio : ratios) {
    for (double buffer : buffers) {
      SimConfig config = base;
      config.channel_rate_bps = 0.0;  // the ratio column is the authority here
      config.channel_rate_ratio = ratio;
      if (args.sweep == "sender") {
        config.sender_buffer_bits = buffer;
      } else if (args.sweep == "receiver") {
        config.receiver_buffer_bits = buffer;
        // The sender stage is not under study in a receiver sweep; size its
        // buffer for at most 5% loss unless the config pins a finite value.
        if (std::isinf(config.sender_buffer_bits)) config.auto_size_sender = true;
      }
      const SimReport report = run_experiment(trace, schedule, config);

      auto row_prefix = [&](const std::string& run) {
        out << args.mode << ',' << sweep_name << ',' << format_double(ratio) << ','
            << format_double(report.channel_rate_bps) << ',' << format_double(buffer)
            << ',' << format_double(report.sender_buffer_bits) << ',' << run << ',';
      };
      for (std::size_t r = 0; r < report.runs.size(); ++r) {
        const RunCounters& c = report.runs[r];
        row_prefix(std::to_string(r));
        out << c.offered << ',' << c.sender_dropped << ',' << c.channel_lost << ','
            << c.late << ',' << c.overflow << ',' << format_double(c.sender_loss) << ','
            << format_double(c.playout_loss) << ',' << format_double(c.overall_loss)
            << '\n';
      }
      row_prefix("mean");
      out << report.runs.front().offered << ",,,,," << format_double(report.sender_loss_mean)
          << ',' << format_double(report.playout_loss_mean) << ','
          << format_double(report.overall_loss_mean) << '\n';
      row_prefix("std");
      out << report.runs.front().offered << ",,,,," << format_double(report.sender_loss_std)
          << ',' << format_double(report.playout_loss_std) << ','
          << format_double(report.overall_loss_std) << '\n';
    }
  }
  out.flush();
  if (!out) throw std::runtime_error(args.out_path + ": write failed");
  std::cout << "wrote results for " << ratios.size() << " rate ratio(s) x "
            << buffers.size() << " buffer point(s) to " << args.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiview video traffic modeling: fit, synthesize, analyze, simulate"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate model parameters from a trace");
  fit_cmd->add_option("--trace", fit_args.trace_path, "Input trace CSV")->required();
  fit_cmd->add_option("--structure", fit_args.structure_path, "GOP structure JSON")
      ->required();
  fit_cmd->add_option("--out-model", fit_args.out_model, "Output model JSON")->required();
  fit_cmd->add_option("--report", fit_args.report_path,
                      "Optional per-iteration log-likelihood CSV");
  fit_cmd->add_option("--states", fit_args.states, "Number of activity states")
      ->capture_default_str();
  fit_cmd->add_option("--ll-threshold", fit_args.ll_threshold,
                      "Stop when consecutive log likelihoods differ by less than this")
      ->capture_default_str();
  fit_cmd->add_option("--max-iters", fit_args.max_iters, "Iteration cap")
      ->capture_default_str();
  fit_cmd->add_option("--pmf-floor", fit_args.pmf_floor,
                      "Floor for zero-probability emission bins")
      ->capture_default_str();
  fit_cmd->add_option("--max-duration", fit_args.max_duration,
                      "Cap on the tracked extra stay (0 = exact)")
      ->capture_default_str();
  fit_cmd->add_option("--seed", fit_args.seed, "Initialization seed")->capture_default_str();

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Synthesize a trace from a fitted model");
  gen_cmd->add_option("--model", gen_args.model_path, "Model JSON")->required();
  gen_cmd->add_option("--gops", gen_args.gops, "Number of GOPs to generate")->required();
  gen_cmd->add_option("--out-trace", gen_args.out_trace, "Output trace CSV")->required();
  gen_cmd->add_option("--seed", gen_args.seed, "Generation seed")->capture_default_str();

  StatsArgs stats_args;
  auto* stats_cmd =
      app.add_subcommand("stats", "Summary, autocorrelation, and Q-Q comparisons");
  stats_cmd->add_option("--trace-a", stats_args.trace_a, "First trace CSV")->required();
  stats_cmd->add_option("--trace-b", stats_args.trace_b,
                        "Second trace CSV (enables the Q-Q output)");
  stats_cmd->add_option("--structure", stats_args.structure_path,
                        "Structure JSON (otherwise inferred from the CSV)");
  stats_cmd->add_option("--view", stats_args.view, "Restrict to one view (-1 = all)")
      ->capture_default_str();
  stats_cmd->add_option("--max-lag", stats_args.max_lag,
                        "Autocorrelation lag bound (0 = min(100, length-1))")
      ->capture_default_str();
  stats_cmd->add_option("--qq-points", stats_args.qq_points_count, "Quantile pairs")
      ->capture_default_str();
  stats_cmd->add_option("--out-prefix", stats_args.out_prefix, "Prefix for output CSVs")
      ->required();

  VsmArgs vsm_args;
  auto* vsm_cmd = app.add_subcommand("vsm", "Sample a view-switching schedule");
  vsm_cmd->add_option("--params", vsm_args.params_path, "View-switching JSON")->required();
  vsm_cmd->add_option("--horizon", vsm_args.horizon_s, "Schedule length, seconds")
      ->required();
  vsm_cmd->add_option("--out-schedule", vsm_args.out_schedule, "Output schedule CSV")
      ->required();
  vsm_cmd->add_option("--seed", vsm_args.seed, "Sampling seed")->capture_default_str();

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Sender/channel/playout loss experiments");
  sim_cmd->add_option("--source", sim_args.source, "'trace' or 'model'")->required();
  sim_cmd->add_option("--trace", sim_args.trace_path, "Trace CSV (source=trace)");
  sim_cmd->add_option("--structure", sim_args.structure_path,
                      "Structure JSON for the trace (otherwise inferred)");
  sim_cmd->add_option("--model", sim_args.model_path, "Model JSON (source=model)");
  sim_cmd->add_option("--gops", sim_args.gops, "GOPs to generate (source=model)")
      ->capture_default_str();
  sim_cmd->add_option("--mode", sim_args.mode, "'multiview' or 'interactive'")
      ->capture_default_str();
  sim_cmd->add_option("--vsm", sim_args.vsm_path, "View-switching JSON (interactive mode)");
  sim_cmd->add_option("--config", sim_args.config_path, "Simulation configuration JSON");
  sim_cmd->add_option("--sweep", sim_args.sweep, "Sweep 'sender' or 'receiver' buffer");
  sim_cmd->add_option("--buffer-list", sim_args.buffer_list,
                      "Comma-separated buffer sizes in bits for the sweep");
  sim_cmd->add_option("--rate-ratios", sim_args.rate_ratios,
                      "Comma-separated channel rate / source rate ratios")
      ->capture_default_str();
  sim_cmd->add_option("--runs", sim_args.runs, "Monte Carlo runs (0 = config value)")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "Master seed for generation and channel")
      ->each([&](const std::string&) { sim_args.seed_given = true; });
  sim_cmd->add_option("--out", sim_args.out_path, "Output results CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_args);
    if (gen_cmd->parsed()) return run_generate(gen_args);
    if (stats_cmd->parsed()) return run_stats(stats_args);
    if (vsm_cmd->parsed()) return run_vsm(vsm_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
  } catch (const std::exception& e) {
    std::cerr << "mvtraffic: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
