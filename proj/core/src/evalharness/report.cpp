#include "claimforge/evalharness/report.h"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "claimforge/error.h"

namespace claimforge::evalharness {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Json eval_json(const EvalReport& r) {
  Json j;
  j["system"] = r.system;
  j["backend"] = std::string(searchenv::backend_name(r.backend));
  j["metric"] = std::string(searchenv::metric_name(r.spec.metric));
  j["k"] = r.spec.k;
  j["n_claims"] = r.n_claims();
  j["original_mean"] = r.original_mean;
  j["rewritten_mean"] = r.rewritten_mean;
  j["relative_improvement"] = r.relative_improvement ? Json(*r.relative_improvement) : Json(nullptr);
  return j;
}

Json curve_json(const StepCurve& curve) {
  Json j;
  Json rows = Json::array();
  for (const auto& row : curve.rows) {
    rows.push_back(Json{{"segment", std::string(segment_name(row.segment))},
                        {"turn", row.turn},
                        {"count", row.count},
                        {"mean", row.mean}});
  }
  j["segments"] = Json{{"improved", curve.records[0]},
                       {"same", curve.records[1]},
                       {"decreased", curve.records[2]}};
  j["same_constant"] = curve.same_constant;
  j["same_varying"] = curve.same_varying;
  j["rows"] = std::move(rows);
  return j;
}

std::string gnuplot_script(const StepCurve& curve) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set xlabel 'turn'\n"
      << "set ylabel 'mean reward'\n"
      << "set key outside\n"
      << "plot";
  bool first = true;
  for (std::size_t s = 0; s < 3; ++s) {
    if (curve.records[s] == 0) continue;
    const auto name = segment_name(static_cast<Segment>(s));
    out << (first ? " " : ", \\\n     ") << "'step_curve.csv' using 2:($1 eq '" << name
        << "' ? $4 : NaN) with linespoints title '" << name << "'";
    first = false;
  }
  if (first) out << " NaN notitle";
  out << '\n';
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

}  // namespace

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string report_json(const ReportBundle& bundle) {
  Json j;
  j["primary"] = eval_json(bundle.primary);
  Json baselines = Json::array();
  for (const auto& b : bundle.baselines) baselines.push_back(eval_json(b));
  j["baselines"] = std::move(baselines);
  j["step_curve"] = curve_json(step_curve(bundle.primary.records, bundle.flat_epsilon));
  Json actions = Json::array();
  for (const auto& row : action_analysis(bundle.primary.records)) {
    actions.push_back(Json{{"kind", std::string(lexedit::edit_kind_name(row.kind))},
                           {"improved", row.improved},
                           {"unchanged", row.unchanged},
                           {"decreased", row.decreased},
                           {"mean_delta", row.mean_delta}});
  }
  j["actions"] = std::move(actions);
  Json ablation = Json::array();
  for (const auto& c : bundle.ablation) {
    ablation.push_back(Json{{"backend", std::string(searchenv::backend_name(c.key.backend))},
                            {"metric", std::string(searchenv::metric_name(c.key.metric))},
                            {"include_negative", c.key.include_negative},
                            {"claim_mean", c.claim_mean},
                            {"rl_mean", c.rl_mean},
                            {"n_claims", c.n_claims}});
  }
  j["ablation"] = std::move(ablation);
  Json records = Json::array();
  for (const auto& r : bundle.primary.records) {
    records.push_back(Json{{"claim_id", r.claim_id},
                           {"original_reward", r.original_reward},
                           {"final_reward", r.final_reward()},
                           {"actions", r.actions},
                           {"rewards", r.rewards},
                           {"final_text", r.final_text()}});
  }
  j["records"] = std::move(records);
  return j.dump(2) + "\n";
}

void write_per_claim_csv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "system,claim_id,original_reward,final_reward,n_edits,actions,final_text\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.records) {
      std::string actions;
      for (std::size_t i = 0; i < r.actions.size(); ++i) {
        if (i) actions += ' ';
        actions += lexedit::to_string(lexedit::unflatten_action(r.actions[i]));
      }
      out << csv_field(rep.system) << ',' << csv_field(r.claim_id) << ',' << num(r.original_reward)
          << ',' << num(r.final_reward()) << ',' << r.actions.size() << ',' << csv_field(actions)
          << ',' << csv_field(r.final_text()) << '\n';
    }
  }
}

void write_step_curve_csv(std::ostream& out, const StepCurve& curve) {
  out << "segment,turn,count,mean\n";
  for (const auto& row : curve.rows) {
    out << segment_name(row.segment) << ',' << row.turn << ',' << row.count << ',' << num(row.mean)
        << '\n';
  }
}

void write_actions_csv(std::ostream& out, std::span<const ActionRow> rows) {
  out << "kind,improved,unchanged,decreased,mean_delta\n";
  for (const auto& row : rows) {
    out << lexedit::edit_kind_name(row.kind) << ',' << row.improved << ',' << row.unchanged << ','
        << row.decreased << ',' << num(row.mean_delta) << '\n';
  }
}

void write_ablation_csv(std::ostream& out, std::span<const AblationCell> cells) {
  out << "backend,metric,include_negative,claim_mean,rl_mean,n_claims\n";
  for (const auto& c : cells) {
    out << searchenv::backend_name(c.key.backend) << ',' << searchenv::metric_name(c.key.metric)
        << ',' << (c.key.include_negative ? "true" : "false") << ',' << num(c.claim_mean) << ','
        << num(c.rl_mean) << ',' << c.n_claims << '\n';
  }
}

void write_report_dir(const std::filesystem::path& dir, const ReportBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  const auto curve = step_curve(bundle.primary.records, bundle.flat_epsilon);
  write_file(dir / "report.json", report_json(bundle));

  std::vector<EvalReport> all{bundle.primary};
  all.insert(all.end(), bundle.baselines.begin(), bundle.baselines.end());
  std::ostringstream per_claim;
  write_per_claim_csv(per_claim, all);
  write_file(dir / "per_claim.csv", per_claim.str());

  std::ostringstream curve_csv;
  write_step_curve_csv(curve_csv, curve);
  write_file(dir / "step_curve.csv", curve_csv.str());
  write_file(dir / "step_curve.json", curve_json(curve).dump(2) + "\n");
  write_file(dir / "step_curve.gp", gnuplot_script(curve));

  std::ostringstream actions;
  const auto rows = action_analysis(bundle.primary.records);
  write_actions_csv(actions, rows);
  write_file(dir / "actions.csv", actions.str());

  std::ostringstream ablation;
  write_ablation_csv(ablation, bundle.ablation);
  write_file(dir / "ablation.csv", ablation.str());
}

}  // namespace claimforge::evalharness
