#pragma once

// Command dispatch for the nureach executable. Kept in a header so the test
// suite can drive it in-process.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nureach/nureach.hpp"

namespace nureach::cli {

inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidArgument(flag + ": '" + item + "' is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v))
      throw InvalidArgument(flag + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument(flag + ": expected a comma-separated list");
  return out;
}

inline RealVector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Options {
  std::string file;
  std::string format = "text";
  std::optional<double> tol;
  std::optional<double> rank_tol;
  std::optional<double> cluster_tol;
  std::optional<double> residual_tol;
  std::uint64_t seed = 0;
  std::string schedule;
  std::string x0;
  std::string target;
  std::string outputs;
  std::string window;
  std::optional<double> final_time;
  double t0 = 0.0;
  int count = 0;
  double min_spacing = 0.0;
  double period = 0.0;
  int horizon = 0;
};

class Session {
 public:
  Session(const Options& opt, std::ostream& out, std::ostream& err)
      : opt_(opt), out_(out), err_(err) {
    std::ifstream in(opt.file);
    if (!in) throw InvalidArgument("cannot open system file '" + opt.file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    doc_ = parse_system_document(buf.str());
    realization_ = to_realization(doc_);
    tol_ = document_tolerances(doc_);
    if (opt.tol) tol_.singular = *opt.tol;
    if (opt.rank_tol) tol_.rank = *opt.rank_tol;
    if (opt.cluster_tol) tol_.cluster = *opt.cluster_tol;
    if (opt.residual_tol) tol_.residual = *opt.residual_tol;
  }

  const Realization& realization() const { return *realization_; }
  const Tolerances& tolerances() const { return tol_; }
  const SystemDocument& document() const { return doc_; }

  SamplingSchedule schedule() {
    if (!opt_.schedule.empty()) {
      if (doc_.schedule) warnings_.push_back("--schedule overrides the schedule in the system file");
      return SamplingSchedule::make(parse_list(opt_.schedule, "--schedule"));
    }
    if (doc_.schedule) return SamplingSchedule::make(*doc_.schedule);
    throw InvalidArgument("no schedule: pass --schedule or add \"schedule\" to the system file");
  }

  RealVector initial_state() {
    if (!opt_.x0.empty()) {
      if (doc_.x0) warnings_.push_back("--x0 overrides x0 in the system file");
      return to_vector(parse_list(opt_.x0, "--x0"));
    }
    if (doc_.x0) return to_vector(*doc_.x0);
    return RealVector::Zero(realization_->order());
  }

  void emit(nlohmann::ordered_json j) {
    if (!j.contains("tolerances")) j["tolerances"] = to_json(tol_);
    if (!warnings_.empty()) {
      auto& w = j["warnings"];
      if (!w.is_array()) w = nlohmann::ordered_json::array();
      for (const auto& s : warnings_) w.push_back(s);
    }
    if (opt_.format == "json")
      out_ << j.dump(2) << "\n";
    else
      out_ << render_text(j);
  }

  void warn(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  const Options& opt_;
  std::ostream& out_;
  std::ostream& err_;
  SystemDocument doc_;
  std::optional<Realization> realization_;
  Tolerances tol_;
  std::vector<std::string> warnings_;
};

inline int cmd_analyze(const Options& opt, std::ostream& out, std::ostream& err) {
  Session session(opt, out, err);
  const SamplingSchedule s = session.schedule();
  const AnalysisReport report = analyze(session.realization(), s, session.tolerances());
  session.emit(to_json(report));
  return static_cast<int>(exit_code(report));
}

inline int cmd_forbidden(const Options& opt, std::ostream& out, std::ostream& err) {
  Session session(opt, out, err);
  std::vector<double> window = opt.window.empty() ? std::vector<double>{opt.t0, opt.t0 + 10.0}
                                                  : parse_list(opt.window, "--window");
  if (window.size() != 2) throw InvalidArgument("--window: expected two numbers 'lo,hi'");
  try {
    const ForbiddenSet fs = forbidden_instants_order2(session.realization(), opt.t0, window[0],
                                                      window[1], session.tolerances());
    nlohmann::ordered_json j;
    j["base_instant"] = fs.base_instant;
    j["frequency"] = fs.frequency;
    j["period"] = fs.period;
    j["window"] = window;
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& f : fs.forbidden)
      list.push_back({{"k", f.k}, {"t", f.t}, {"degenerate", f.degenerate}});
    j["forbidden"] = list;
    j["guard_band"] = fs.guard_band;
    session.emit(j);
    return 0;
  } catch (const NotApplicableError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const UnsupportedOrderError& e) {
    err << e.what() << "\n";
    return 2;
  }
}

inline int cmd_suggest(const Options& opt, std::ostream& out, std::ostream& err) {
  Session session(opt, out, err);
  const std::vector<double> window = parse_list(opt.window, "--window");
  if (window.size() != 2) throw InvalidArgument("--window: expected two numbers 'lo,hi'");
  ScheduleSearchSpec spec{window[0], window[1], opt.min_spacing,
                          opt.count > 0 ? opt.count : session.realization().order()};
  try {
    const ScheduleSuggestion s =
        suggest_schedule(session.realization(), spec, opt.seed, session.tolerances());
    session.emit({{"schedule", s.instants},
                  {"objective", s.objective},
                  {"grid_step", s.grid_step},
                  {"seed", opt.seed}});
    return 0;
  } catch (const InfeasibleError& e) {
    err << e.what() << "\n";
    return 2;
  }
}

inline int cmd_deadbeat(const Options& opt, std::ostream& out, std::ostream& err) {
  Session session(opt, out, err);
  const Realization& r = session.realization();
  const SamplingSchedule s = session.schedule();
  const RealVector x0 = session.initial_state();
  if (opt.target.empty()) throw InvalidArgument("--target is required");
  const RealVector target = to_vector(parse_list(opt.target, "--target"));
  try {
    const auto count = static_cast<std::size_t>(r.order());
    std::optional<double> tn = opt.final_time;
    if (!tn && s.size() > count) tn = s[count];
    const std::vector<double> u = deadbeat_inputs(r, s, x0, target, tn, session.tolerances());
    const SamplingSchedule inputs_at = s.prefix(count);
    const double final_time =
        tn.value_or(count > 1 ? inputs_at.back() + (inputs_at.back() - inputs_at.front()) /
                                                       static_cast<double>(count - 1)
                              : inputs_at.back() + 1.0);
    std::vector<double> sim_instants(inputs_at.instants().begin(), inputs_at.instants().end());
    sim_instants.push_back(final_time);
    const Trajectory traj = simulate_impulse(r, SamplingSchedule::make(sim_instants), u, x0);
    const RealVector reached = traj.states.back();
    const double residual = (reached - target).norm() / std::max(1.0, target.norm());
    session.emit({{"inputs", u},
                  {"instants", sim_instants},
                  {"final_time", final_time},
                  {"reached", std::vector<double>(reached.data(), reached.data() + reached.size())},
                  {"target", std::vector<double>(target.data(), target.data() + target.size())},
                  {"resimulation_residual", residual}});
    return 0;
  } catch (const SingularScheduleError& e) {
    err << e.what() << "\n";
    return 2;
  }
}

inline int cmd_reconstruct(const Options& opt, std::ostream& out, std::ostream& err) {
  Session session(opt, out, err);
  const Realization& r = session.realization();
  const SamplingSchedule s = session.schedule();
  if (opt.outputs.empty()) throw InvalidArgument("--outputs is required");
  const std::vector<double> y = parse_list(opt.outputs, "--outputs");
  try {
    const RealVector x0 = reconstruct_state(r, s, y, session.tolerances());
    const SamplingSchedule used = s.prefix(static_cast<std::size_t>(r.order()));
    const std::vector<double> zeros(used.size() - 1, 0.0);
    const Trajectory traj = simulate_impulse(r, used, zeros, x0);
    double err_norm = 0.0;
    double y_norm = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      err_norm += (traj.outputs[i] - y[i]) * (traj.outputs[i] - y[i]);
      y_norm += y[i] * y[i];
    }
    session.emit({{"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                  {"outputs", y},
                  {"resimulated_outputs", traj.outputs},
                  {"resimulation_residual", std::sqrt(err_norm) / std::max(1.0, std::sqrt(y_norm))}});
    return 0;
  } catch (const SingularScheduleError& e) {
    err << e.what() << "\n";
    return 2;
  }
}

inline int cmd_uniform(const Options& opt, std::ostream& out, std::ostream& err) {
  Session session(opt, out, err);
  const UniformVerdict v =
      validate_uniform(session.realization(), opt.period, opt.horizon, session.tolerances());
  nlohmann::ordered_json j;
  j["passed"] = v.passed;
  j["period"] = opt.period;
  j["instants"] = v.instants;
  j["criterion"] = to_json(v.report);
  if (v.first_failing_window) j["first_failing_window"] = *v.first_failing_window;
  nlohmann::ordered_json alias = nlohmann::ordered_json::array();
  for (const auto& a : v.aliasing)
    alias.push_back({{"frequency", a.frequency}, {"k", a.k}, {"distance", a.distance}});
  j["aliasing"] = alias;
  session.emit(j);
  return v.passed ? 0 : 2;
}

/// Runs the command line; returns the process exit code.
/// 0 success / jointly reachable, 2 negative verdict, 3 non-minimal, 1 usage or parse error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reachability and observability of nonuniformly sampled SISO systems", "nureach"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--tol", opt.tol, "singularity threshold on the mode-matrix sigma ratio");
  app.add_option("--rank-tol", opt.rank_tol, "relative singular value cut-off for rank tests");
  app.add_option("--cluster-tol", opt.cluster_tol, "eigenvalue clustering radius");
  app.add_option("--residual-tol", opt.residual_tol, "least-squares membership tolerance");
  app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", opt.seed, "seed for schedule search");

  auto* analyze_cmd = app.add_subcommand("analyze", "full reachability/observability analysis");
  analyze_cmd->add_option("file", opt.file, "system JSON file")->required();
  analyze_cmd->add_option("--schedule", opt.schedule, "comma-separated sampling instants");

  auto* forbidden_cmd = app.add_subcommand("forbidden", "forbidden instants of an oscillatory order-2 system");
  forbidden_cmd->add_option("file", opt.file, "system JSON file")->required();
  forbidden_cmd->add_option("--t0", opt.t0, "first sampling instant");
  forbidden_cmd->add_option("--window", opt.window, "query window 'lo,hi'");

  auto* suggest_cmd = app.add_subcommand("suggest", "search a well-conditioned schedule");
  suggest_cmd->add_option("file", opt.file, "system JSON file")->required();
  suggest_cmd->add_option("--window", opt.window, "window 'lo,hi'")->required();
  suggest_cmd->add_option("--count", opt.count, "number of instants (default: order)");
  suggest_cmd->add_option("--min-spacing", opt.min_spacing, "minimum spacing")->required();

  auto* deadbeat_cmd = app.add_subcommand("deadbeat", "inputs reaching a target state in n steps");
  deadbeat_cmd->add_option("file", opt.file, "system JSON file")->required();
  deadbeat_cmd->add_option("--schedule", opt.schedule, "input instants (an extra instant is the final time)");
  deadbeat_cmd->add_option("--x0", opt.x0, "initial state at the first instant");
  deadbeat_cmd->add_option("--target", opt.target, "target state")->required();
  deadbeat_cmd->add_option("--final-time", opt.final_time, "time at which the target is reached");

  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "initial state from free-response outputs");
  reconstruct_cmd->add_option("file", opt.file, "system JSON file")->required();
  reconstruct_cmd->add_option("--schedule", opt.schedule, "output instants");
  reconstruct_cmd->add_option("--outputs", opt.outputs, "sampled outputs")->required();

  auto* uniform_cmd = app.add_subcommand("uniform", "verdict for uniform sampling with interval T");
  uniform_cmd->add_option("file", opt.file, "system JSON file")->required();
  uniform_cmd->add_option("--period", opt.period, "sampling interval T")->required();
  uniform_cmd->add_option("--horizon", opt.horizon, "number of instants (default: order)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (analyze_cmd->parsed()) return cmd_analyze(opt, out, err);
    if (forbidden_cmd->parsed()) return cmd_forbidden(opt, out, err);
    if (suggest_cmd->parsed()) return cmd_suggest(opt, out, err);
    if (deadbeat_cmd->parsed()) return cmd_deadbeat(opt, out, err);
    if (reconstruct_cmd->parsed()) return cmd_reconstruct(opt, out, err);
    if (uniform_cmd->parsed()) return cmd_uniform(opt, out, err);
  } catch (const MinimalityError& e) {
    err << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace nureach::cli
