#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "claimforge/evalharness/ablation.h"
#include "claimforge/evalharness/evaluate.h"

namespace claimforge::evalharness {

struct ReportBundle {
  EvalReport primary;                // the evaluated policy
  std::vector<EvalReport> baselines;  // e.g. claim, random
  double flat_epsilon = 0.01;
  std::vector<AblationCell> ablation;  // may be empty
};

// Writes report.json, per_claim.csv, step_curve.csv, step_curve.json,
// step_curve.gp, actions.csv and ablation.csv. No timestamps or paths are
// embedded, so equal inputs give byte-identical files.
void write_report_dir(const std::filesystem::path& dir, const ReportBundle& bundle);

std::string report_json(const ReportBundle& bundle);
void write_per_claim_csv(std::ostream& out, std::span<const EvalReport> reports);
void write_step_curve_csv(std::ostream& out, const StepCurve& curve);
void write_actions_csv(std::ostream& out, std::span<const ActionRow> rows);
void write_ablation_csv(std::ostream& out, std::span<const AblationCell> cells);

// RFC 4180 field quoting.
std::string csv_field(std::string_view s);

}  // namespace claimforge::evalharness
