#include "fracstokes/output.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace fracstokes {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string chars(double v, std::chars_format fmt, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, fmt, precision);
  return std::string(buf, res.ptr);
}

ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

ordered_json json_number(const std::optional<double>& v) {
  return v ? json_number(*v) : ordered_json(nullptr);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  return chars(v, std::chars_format::general, 10);
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

std::string format_ml_value(double v) {
  if (v != 0.0 && std::fabs(v) < 1e-3) return chars(v, std::chars_format::scientific, 10);
  return chars(v, std::chars_format::fixed, 10);
}

double round_significant(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  const std::string s = chars(v, std::chars_format::general, 10);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

std::string sweep_csv(const SweepResult& result, const SweepConfig& config) {
  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  for (const auto& r : result.records) {
    out << format_number(r.p) << ',' << format_number(r.amplitude) << ',' << format_number(config.alpha)
        << ',' << format_number(config.sigma) << ',' << format_number(config.rho) << ','
        << config.grid.ndim << ',' << to_string(r.status) << ',' << format_number(r.t_star) << ','
        << format_number(r.max_sup_norm) << ',' << r.picard_iters << ',' << format_number(r.runtime_s)
        << '\n';
  }
  return out.str();
}

std::string boundary_json(const SweepResult& result, const SweepConfig& config) {
  ordered_json j;
  j["p_c_theory"] = json_number(result.p_c_theory);
  j["p_c_empirical"] = json_number(result.empirical_boundary);
  j["half_width"] = json_number(result.half_width);
  j["heuristic"] = true;
  j["protocol"] = {
      {"alpha", json_number(config.alpha)},
      {"sigma", json_number(config.sigma)},
      {"rho", json_number(config.rho)},
      {"N", config.grid.ndim},
      {"points", config.grid.points},
      {"half_width_box", json_number(config.grid.half_width)},
      {"horizon", json_number(config.horizon)},
      {"steps", config.steps},
      {"initial_width", json_number(config.effective_width())},
      {"growth_factor", json_number(config.growth_factor)},
      {"seed", config.seed},
  };
  ordered_json inconclusive = ordered_json::array();
  for (const auto& r : result.records) {
    if (r.status != RunStatus::Inconclusive) continue;
    inconclusive.push_back(
        {{"p", json_number(r.p)}, {"amplitude", json_number(r.amplitude)}, {"note", r.note}});
  }
  j["inconclusive_cells"] = std::move(inconclusive);
  j["monotonicity_violations"] = result.monotonicity_violations;
  return j.dump(2) + "\n";
}

std::string norm_csv(const std::vector<NormRow>& rows) {
  std::ostringstream out;
  out << "t,p,norm\n";
  for (const auto& r : rows) {
    out << format_number(r.t) << ',' << format_number(r.p) << ',' << format_number(r.norm) << '\n';
  }
  return out.str();
}

namespace {

ordered_json outcome_object(const RunOutcome& o) {
  ordered_json j;
  j["status"] = to_string(o.status);
  j["t_star"] = json_number(o.t_star);
  j["max_sup_norm"] = json_number(o.max_sup_norm);
  j["min_value"] = json_number(o.min_value);
  int iters = 0;
  for (int k : o.picard_iters_history) iters += k;
  j["picard_iters"] = iters;
  j["windows"] = o.picard_iters_history.size();
  j["contraction_ratio"] = json_number(o.contraction_ratio);
  j["clamped_samples"] = o.clamped_samples;
  j["t_final"] = o.sup_norm_history.empty() ? ordered_json(nullptr)
                                            : json_number(o.sup_norm_history.back().first);
  j["note"] = o.note;
  return j;
}

}  // namespace

std::string run_log_jsonl(const RunOutcome& outcome, int window_nodes) {
  std::ostringstream out;
  const auto& hist = outcome.picard_iters_history;
  for (std::size_t j = 0; j < outcome.sup_norm_history.size(); ++j) {
    int iters = 0;
    if (j > 0 && !hist.empty()) {
      const std::size_t w = window_nodes > 0 ? (j - 1) / window_nodes : 0;
      iters = w < hist.size() ? hist[w] : 0;
    }
    ordered_json line;
    line["t"] = json_number(outcome.sup_norm_history[j].first);
    line["sup"] = json_number(outcome.sup_norm_history[j].second);
    line["iterations"] = iters;
    out << line.dump() << '\n';
  }
  ordered_json final_line{{"event", "outcome"}};
  const ordered_json summary = outcome_object(outcome);
  for (const auto& [key, value] : summary.items()) final_line[key] = value;
  out << final_line.dump() << '\n';
  return out.str();
}

std::string outcome_json(const RunOutcome& outcome) { return outcome_object(outcome).dump(2) + "\n"; }

std::string outcome_line(const RunOutcome& o) {
  int iters = 0;
  for (int k : o.picard_iters_history) iters += k;
  std::ostringstream out;
  out << "status=" << to_string(o.status) << " t_star=" << format_number(o.t_star)
      << " max_sup_norm=" << format_number(o.max_sup_norm) << " picard_iters=" << iters;
  if (!o.note.empty()) out << " note=\"" << o.note << '"';
  return out.str();
}

}  // namespace fracstokes
