#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coa/game_analysis.hpp"
#include "coa/matrix_engine.hpp"

namespace coa {

// Decimal rounding, half away from zero, applied to the shortest round-trip
// decimal form of `value` (so 2.675 -> "2.68"). Always prints `decimals` digits.
std::string format_fixed(double value, int decimals);
double round_half_up(double value, int decimals);

// Preference marks (A = attacker best response in that column, D = defender
// best response in that row).
enum class Mark { none, attacker, defender, both };
std::string_view mark_text(Mark mark);

struct MarkGrid {
  std::vector<int> attack_ids;
  std::vector<int> defense_ids;
  std::vector<std::vector<Mark>> cells;  // [attack pos][defense pos]
};

MarkGrid emit_preference_marks(const MatrixBundle& bundle, Criterion criterion);

// A matrix labelled by strategy ids, e.g. one of the bundle matrices or the
// 1-row defender strategy-cost vector.
struct LabeledMatrix {
  std::string name;
  std::vector<int> row_ids;
  std::vector<int> col_ids;
  Matrix values;
};

LabeledMatrix labeled(const MatrixBundle& bundle, MatrixKind kind);
// Row "0" holding C_d,j per defense strategy.
LabeledMatrix strategy_cost_row(const MatrixBundle& bundle);

// Reference table as printed: each cell keeps the number of decimals it was
// printed with; engine values are rounded to that precision before comparing.
struct GoldenCell {
  double value = 0.0;
  int decimals = 0;
};

struct GoldenTable {
  std::string name;
  std::vector<int> row_ids;
  std::vector<int> col_ids;
  std::vector<std::vector<GoldenCell>> cells;
};

// CSV: header "<corner>,<col id>,...", then "<row id>,<value>,...".
GoldenTable parse_golden_csv(std::string_view name, std::string_view csv);
GoldenTable load_golden_csv(const std::filesystem::path& path);

// Known misprints in a reference table: the printed value and the value
// recomputed from the source inputs.
struct Annotation {
  std::string matrix;
  int attack = 0;
  int defense = 0;
  double paper_value = 0.0;
  double reconciled_value = 0.0;
  std::string note;
};

std::vector<Annotation> parse_annotations(std::string_view json_text);
std::vector<Annotation> load_annotations(const std::filesystem::path& path);

struct Mismatch {
  int row = 0;
  int col = 0;
  double expected = 0.0;
  double actual = 0.0;
};

struct Footnote {
  int row = 0;
  int col = 0;
  double printed = 0.0;
  double reconciled = 0.0;
  std::string note;
};

struct GoldenComparison {
  std::vector<Mismatch> mismatches;
  std::vector<Footnote> footnotes;

  bool ok() const { return mismatches.empty(); }
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Annotated cells are compared (within tolerance, unrounded) against the
// reconciled value; the printed value becomes a footnote.
GoldenComparison compare_golden(const LabeledMatrix& actual, const GoldenTable& golden,
                                double tolerance,
                                const std::vector<Annotation>& annotations = {});

// RFC 4180 CSV with the header "i\j,<defense ids>" and rows "<attack id>,...".
std::string matrix_csv(const LabeledMatrix& matrix, int precision);
std::string marks_csv(const MarkGrid& grid);

struct ReportOptions {
  int precision = 2;
  std::vector<Annotation> annotations;
  std::vector<SelectionResult> selections;
};

std::string text_report(std::string_view scenario_name, const MatrixBundle& bundle,
                        const ReportOptions& options);

// Writes C_a.csv, C_d.csv, P_T.csv, u_a.csv, u_d.csv, strategy_costs.csv,
// marks_cost_utility.csv, marks_penetration.csv and report.txt.
std::vector<std::filesystem::path> write_report_files(const std::filesystem::path& dir,
                                                      std::string_view scenario_name,
                                                      const MatrixBundle& bundle,
                                                      const ReportOptions& options);

}  // namespace coa
