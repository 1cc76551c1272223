#pragma once

// Analysis reports. The JSON value is the single source; the text form is
// rendered from it, so the two never diverge.

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nureach/criterion.hpp"
#include "nureach/experiments.hpp"
#include "nureach/oracle.hpp"
#include "nureach/system_model.hpp"

namespace nureach {

struct AnalysisReport {
  Tolerances tolerances;
  std::vector<double> schedule;
  MinimalityReport minimality;
  std::vector<Eigenvalue> modes;
  std::optional<CriterionReport> criterion;
  std::optional<OracleReport> oracle;
  std::optional<CaseLabel> case_label;
  std::vector<std::string> warnings;
};

enum class ExitCode { kJoint = 0, kUsage = 1, kNotJoint = 2, kNonMinimal = 3 };

/// Minimality, modes, criterion, oracle cross-check and (order 2 with three
/// instants) the case label. A non-minimal realization stops after the
/// minimality section.
inline AnalysisReport analyze(const Realization& r, const SamplingSchedule& s,
                              const Tolerances& tol = {}) {
  AnalysisReport out;
  out.tolerances = tol;
  out.schedule.assign(s.instants().begin(), s.instants().end());
  out.minimality = check_minimal(r, tol.rank);
  out.modes = eig_clustered(r.a(), tol.cluster);
  if (!out.minimality.minimal) {
    out.warnings.push_back(detail::describe(out.minimality, r.order()));
    return out;
  }
  const ModalAnalysis an(r, tol);
  for (const auto& w : an.decomposition().warnings) out.warnings.push_back(w);
  out.criterion = joint_verdict(an, s, tol);
  out.oracle = cross_validate(an, *out.criterion, s, tol);
  if (!out.criterion->reachable) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "mode matrix sigma_ratio %.6g is below tolerance %.6g",
                  out.criterion->sigma_ratio, tol.singular);
    out.warnings.emplace_back(buf);
  }
  if (!out.criterion->factorization_ok)
    out.warnings.emplace_back("determinant factorization check failed");
  if (!out.oracle->agrees_with_criterion)
    out.warnings.emplace_back("direct rank test disagrees with the mode-matrix criterion");
  if (r.order() == 2 && s.size() >= 3) out.case_label = classify_case(r, s, tol);
  return out;
}

inline ExitCode exit_code(const AnalysisReport& report) {
  if (!report.minimality.minimal) return ExitCode::kNonMinimal;
  return report.criterion && report.criterion->reachable ? ExitCode::kJoint : ExitCode::kNotJoint;
}

inline nlohmann::ordered_json complex_json(Complex z) {
  return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}};
}

inline nlohmann::ordered_json to_json(const Tolerances& t) {
  return {{"cluster_tol", t.cluster},
          {"rank_tol", t.rank},
          {"residual_tol", t.residual},
          {"singular_tol", t.singular}};
}

inline nlohmann::ordered_json to_json(const CriterionReport& c) {
  nlohmann::ordered_json out;
  out["alpha"] = c.intervals.alpha;
  if (c.intervals.alpha_n) out["alpha_n"] = *c.intervals.alpha_n;
  out["mode_det"] = complex_json(c.mode_det);
  out["sigma_ratio"] = c.sigma_ratio;
  out["N1"] = c.n1;
  out["N2"] = complex_json(c.n2);
  out["full_det"] = complex_json(c.full_det);
  out["factorization_residual"] = c.factorization_residual;
  out["factorization_ok"] = c.factorization_ok;
  out["reachable"] = c.reachable;
  out["observable"] = c.observable;
  if (c.controllable) out["controllable"] = *c.controllable;
  if (c.constructible) out["constructible"] = *c.constructible;
  if (c.controllability_residual) out["controllability_residual"] = *c.controllability_residual;
  return out;
}

inline nlohmann::ordered_json to_json(const AnalysisReport& r) {
  nlohmann::ordered_json out;
  switch (exit_code(r)) {
    case ExitCode::kJoint:
      out["verdict"] = "jointly n-reachable and n-observable";
      break;
    case ExitCode::kNonMinimal:
      out["verdict"] = "realization is not minimal";
      break;
    default:
      out["verdict"] = "neither n-reachable nor n-observable";
  }
  out["tolerances"] = to_json(r.tolerances);
  out["schedule"] = r.schedule;
  out["minimality"] = {{"controllable", r.minimality.controllable_ct},
                       {"observable", r.minimality.observable_ct},
                       {"minimal", r.minimality.minimal},
                       {"controllability_rank", r.minimality.controllability.rank},
                       {"controllability_sigma_ratio", r.minimality.controllability.sigma_ratio},
                       {"observability_rank", r.minimality.observability.rank},
                       {"observability_sigma_ratio", r.minimality.observability.sigma_ratio}};
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (const auto& m : r.modes)
    modes.push_back({{"re", m.value.real()}, {"im", m.value.imag()}, {"multiplicity", m.multiplicity}});
  out["modes"] = modes;
  if (r.criterion) out["criterion"] = to_json(*r.criterion);
  if (r.oracle)
    out["oracle"] = {{"reachable", r.oracle->reachable},
                     {"observable", r.oracle->observable},
                     {"agrees_with_criterion", r.oracle->agrees_with_criterion},
                     {"reachability_sigma_ratio", r.oracle->reachability_sigma_ratio},
                     {"observability_sigma_ratio", r.oracle->observability_sigma_ratio}};
  if (r.case_label) {
    nlohmann::ordered_json c = {{"label", std::string(1, to_char(r.case_label->label))},
                        {"sigma_ratio", r.case_label->sigma_ratio}};
    if (r.case_label->membership_residual)
      c["membership_residual"] = *r.case_label->membership_residual;
    out["case"] = c;
  }
  out["warnings"] = r.warnings;
  return out;
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline bool is_scalar_array(const nlohmann::ordered_json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

inline std::string scalar_text(const nlohmann::ordered_json& j) {
  if (j.is_boolean()) return j.get<bool>() ? "yes" : "no";
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) return format_number(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return "-";
  return j.dump();
}

inline void render(const nlohmann::ordered_json& j, int depth, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = j.is_object() ? it.key() : "-";
    const auto& v = it.value();
    if (v.is_object()) {
      os << pad << key << ":\n";
      render(v, depth + 1, os);
    } else if (v.is_array() && is_scalar_array(v)) {
      os << pad << key << ":";
      if (v.empty()) os << " (none)";
      for (const auto& e : v) os << (v.front().is_string() ? "\n" + pad + "  " : " ") << scalar_text(e);
      os << "\n";
    } else if (v.is_array()) {
      os << pad << key << ":\n";
      for (const auto& e : v) {
        os << pad << "  -\n";
        render(e, depth + 2, os);
      }
    } else {
      os << pad << key << ": " << scalar_text(v) << "\n";
    }
  }
}

}  // namespace detail

/// Indented key/value rendering with numbers at 6 significant digits.
inline std::string render_text(const nlohmann::ordered_json& j) {
  std::ostringstream os;
  detail::render(j, 0, os);
  return os.str();
}

}  // namespace nureach
