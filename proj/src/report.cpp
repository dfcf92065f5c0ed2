#include "coa/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "coa/scenario_io.hpp"

namespace coa {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t n = 0; n < line.size(); ++n) {
    const char c = line[n];
    if (quoted) {
      if (c == '"' && n + 1 < line.size() && line[n + 1] == '"') {
        field += '"';
        ++n;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

int parse_id(std::string_view text, std::string_view context) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument(std::string(context) + ": expected an integer id, got '" +
                                std::string(text) + "'");
  }
  return value;
}

GoldenCell parse_golden_cell(std::string_view text, std::string_view context) {
  GoldenCell cell;
  const std::string owned(text);
  char* end = nullptr;
  cell.value = std::strtod(owned.c_str(), &end);
  if (owned.empty() || end != owned.c_str() + owned.size()) {
    throw std::invalid_argument(std::string(context) + ": bad number '" + owned + "'");
  }
  const auto dot = owned.find('.');
  cell.decimals = dot == std::string::npos ? 0 : static_cast<int>(owned.size() - dot - 1);
  return cell;
}

const Annotation* find_annotation(const std::vector<Annotation>& annotations,
                                  std::string_view matrix, int row, int col) {
  for (const auto& a : annotations) {
    if (a.matrix == matrix && a.attack == row && a.defense == col) return &a;
  }
  return nullptr;
}

std::string shortest(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, end) : std::string("?");
}

std::string pad_left(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : std::string(width - text.size(), ' ') + text;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  decimals = std::max(decimals, 0);
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc()) throw std::runtime_error("format_fixed: value too large");
  std::string text(buf, end);

  const bool negative = !text.empty() && text[0] == '-';
  if (negative) text.erase(0, 1);
  const auto dot = text.find('.');
  std::string int_part = dot == std::string::npos ? text : text.substr(0, dot);
  std::string frac_part = dot == std::string::npos ? "" : text.substr(dot + 1);

  const auto keep = static_cast<std::size_t>(decimals);
  bool round_up = frac_part.size() > keep && frac_part[keep] >= '5';
  frac_part.resize(keep, '0');
  if (round_up) {
    std::string digits = int_part + frac_part;
    std::size_t n = digits.size();
    while (n > 0) {
      --n;
      if (digits[n] == '9') {
        digits[n] = '0';
      } else {
        ++digits[n];
        round_up = false;
        break;
      }
    }
    if (round_up) digits.insert(digits.begin(), '1');
    int_part = digits.substr(0, digits.size() - keep);
    frac_part = digits.substr(digits.size() - keep);
  }

  std::string out = int_part;
  if (keep > 0) out += "." + frac_part;
  const bool is_zero = std::all_of(out.begin(), out.end(), [](char c) { return c == '0' || c == '.'; });
  if (negative && !is_zero) out.insert(out.begin(), '-');
  return out;
}

double round_half_up(double value, int decimals) {
  return std::strtod(format_fixed(value, decimals).c_str(), nullptr);
}

std::string_view mark_text(Mark mark) {
  switch (mark) {
    case Mark::none: return "";
    case Mark::attacker: return "A";
    case Mark::defender: return "D";
    case Mark::both: return "AD";
  }
  return "";
}

MarkGrid emit_preference_marks(const MatrixBundle& bundle, Criterion criterion) {
  const auto responses = best_response_sets(bundle, criterion);
  MarkGrid grid;
  grid.attack_ids = bundle.attack_ids;
  grid.defense_ids = bundle.defense_ids;
  grid.cells.assign(bundle.attack_count(), std::vector<Mark>(bundle.defense_count(), Mark::none));
  for (std::size_t i = 0; i < bundle.attack_count(); ++i) {
    for (std::size_t j = 0; j < bundle.defense_count(); ++j) {
      const int attack = bundle.attack_ids[i];
      const int defense = bundle.defense_ids[j];
      const auto& a = responses.attacker.at(defense);
      const auto& d = responses.defender.at(attack);
      const bool is_a = std::find(a.begin(), a.end(), attack) != a.end();
      const bool is_d = std::find(d.begin(), d.end(), defense) != d.end();
      grid.cells[i][j] = is_a && is_d ? Mark::both
                         : is_a       ? Mark::attacker
                         : is_d       ? Mark::defender
                                      : Mark::none;
    }
  }
  return grid;
}

LabeledMatrix labeled(const MatrixBundle& bundle, MatrixKind kind) {
  return {std::string(matrix_symbol(kind)), bundle.attack_ids, bundle.defense_ids,
          select(bundle, kind)};
}

LabeledMatrix strategy_cost_row(const MatrixBundle& bundle) {
  Matrix row(1, bundle.defense_count());
  for (std::size_t j = 0; j < bundle.defense_count(); ++j) {
    row(0, j) = bundle.attack_count() == 0 ? 0.0 : bundle.defender_cost(0, j);
  }
  return {"C_d,j", {0}, bundle.defense_ids, row};
}

GoldenTable parse_golden_csv(std::string_view name, std::string_view csv) {
  GoldenTable table;
  table.name = std::string(name);
  std::istringstream in{std::string(csv)};
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    const std::string context = std::string(name) + " line " + std::to_string(line_no);
    if (header) {
      for (std::size_t n = 1; n < fields.size(); ++n) {
        table.col_ids.push_back(parse_id(fields[n], context));
      }
      header = false;
      continue;
    }
    if (fields.size() != table.col_ids.size() + 1) {
      throw std::invalid_argument(context + ": expected " +
                                  std::to_string(table.col_ids.size() + 1) + " fields");
    }
    table.row_ids.push_back(parse_id(fields[0], context));
    std::vector<GoldenCell> row;
    for (std::size_t n = 1; n < fields.size(); ++n) {
      row.push_back(parse_golden_cell(fields[n], context));
    }
    table.cells.push_back(std::move(row));
  }
  return table;
}

GoldenTable load_golden_csv(const std::filesystem::path& path) {
  return parse_golden_csv(path.stem().string(), read_text_file(path));
}

std::vector<Annotation> parse_annotations(std::string_view json_text) {
  const auto doc = Json::parse(json_text);
  std::vector<Annotation> out;
  for (const auto& item : doc.at("annotations")) {
    Annotation a;
    a.matrix = item.at("matrix").get<std::string>();
    a.attack = item.at("attack").get<int>();
    a.defense = item.at("defense").get<int>();
    a.paper_value = item.at("paper_value").get<double>();
    a.reconciled_value = item.at("reconciled_value").get<double>();
    a.note = item.value("note", "");
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_text_file(path));
}

GoldenComparison compare_golden(const LabeledMatrix& actual, const GoldenTable& golden,
                                double tolerance, const std::vector<Annotation>& annotations) {
  if (actual.row_ids != golden.row_ids || actual.col_ids != golden.col_ids ||
      actual.values.rows() != golden.cells.size()) {
    throw DimensionMismatch("golden table '" + golden.name + "' does not match the dimensions of " +
                            actual.name);
  }
  GoldenComparison out;
  for (std::size_t r = 0; r < golden.row_ids.size(); ++r) {
    for (std::size_t c = 0; c < golden.col_ids.size(); ++c) {
      const int row = golden.row_ids[r];
      const int col = golden.col_ids[c];
      const double value = actual.values(r, c);
      if (const auto* note = find_annotation(annotations, golden.name, row, col)) {
        out.footnotes.push_back({row, col, note->paper_value, note->reconciled_value, note->note});
        if (std::abs(value - note->reconciled_value) > tolerance) {
          out.mismatches.push_back({row, col, note->reconciled_value, value});
        }
        continue;
      }
      const auto& cell = golden.cells[r][c];
      const double rounded = round_half_up(value, cell.decimals);
      if (std::abs(rounded - cell.value) > tolerance) {
        out.mismatches.push_back({row, col, cell.value, value});
      }
    }
  }
  return out;
}

std::string matrix_csv(const LabeledMatrix& matrix, int precision) {
  std::string out = csv_field("i\\j");
  for (int id : matrix.col_ids) out += "," + std::to_string(id);
  out += "\r\n";
  for (std::size_t r = 0; r < matrix.row_ids.size(); ++r) {
    out += std::to_string(matrix.row_ids[r]);
    for (std::size_t c = 0; c < matrix.col_ids.size(); ++c) {
      out += "," + format_fixed(matrix.values(r, c), precision);
    }
    out += "\r\n";
  }
  return out;
}

std::string marks_csv(const MarkGrid& grid) {
  std::string out = csv_field("i\\j");
  for (int id : grid.defense_ids) out += "," + std::to_string(id);
  out += "\r\n";
  for (std::size_t i = 0; i < grid.attack_ids.size(); ++i) {
    out += std::to_string(grid.attack_ids[i]);
    for (auto mark : grid.cells[i]) out += "," + std::string(mark_text(mark));
    out += "\r\n";
  }
  return out;
}

std::string text_report(std::string_view scenario_name, const MatrixBundle& bundle,
                        const ReportOptions& options) {
  std::ostringstream out;
  const int precision = options.precision;
  const std::size_t width = 12;

  std::vector<const Annotation*> used;
  auto footnote_marker = [&](std::string_view matrix, int attack, int defense) -> std::string {
    const auto* a = find_annotation(options.annotations, matrix, attack, defense);
    if (a == nullptr) return "";
    auto it = std::find(used.begin(), used.end(), a);
    if (it == used.end()) {
      used.push_back(a);
      it = used.end() - 1;
    }
    return "[" + std::to_string(it - used.begin() + 1) + "]";
  };

  auto header = [&](std::ostringstream& os) {
    os << pad_left("", 6);
    for (int id : bundle.defense_ids) os << pad_left("j=" + std::to_string(id), width);
    os << "\n";
  };

  out << "Course-of-action analysis: " << scenario_name << "\n";
  out << "Benefit b = " << format_fixed(bundle.benefit, precision) << " k$\n\n";

  out << "Defender Strategy Costs C_d,j [k$]\n";
  header(out);
  out << pad_left("", 6);
  for (std::size_t j = 0; j < bundle.defense_count(); ++j) {
    const double v = bundle.attack_count() ? bundle.defender_cost(0, j) : 0.0;
    out << pad_left(format_fixed(v, precision), width);
  }
  out << "\n\n";

  const std::pair<MatrixKind, std::string_view> sections[] = {
      {MatrixKind::defender_utility, "Defender Cost Utility u_d [k$]"},
      {MatrixKind::attacker_utility, "Attacker Cost Utility u_a [k$]"},
      {MatrixKind::penetration, "Total Attack Penetration Probabilities P_T"},
      {MatrixKind::attacker_cost, "Attacker Costs C_a [k$]"},
  };
  for (const auto& [kind, title] : sections) {
    out << title << "\n";
    header(out);
    const auto& m = select(bundle, kind);
    for (std::size_t i = 0; i < bundle.attack_count(); ++i) {
      out << pad_left("i=" + std::to_string(bundle.attack_ids[i]), 6);
      for (std::size_t j = 0; j < bundle.defense_count(); ++j) {
        const auto marker =
            footnote_marker(matrix_symbol(kind), bundle.attack_ids[i], bundle.defense_ids[j]);
        out << pad_left(format_fixed(m(i, j), precision) + marker, width);
      }
      out << "\n";
    }
    out << "\n";
  }

  for (auto criterion : {Criterion::cost_utility, Criterion::penetration_probability}) {
    out << "Preferred Strategies (" << to_string(criterion)
        << "): A = attacker, D = defender\n";
    header(out);
    const auto grid = emit_preference_marks(bundle, criterion);
    for (std::size_t i = 0; i < grid.attack_ids.size(); ++i) {
      out << pad_left("i=" + std::to_string(grid.attack_ids[i]), 6);
      for (auto mark : grid.cells[i]) out << pad_left(std::string(mark_text(mark)), width);
      out << "\n";
    }
    const auto equilibria = find_pure_equilibria(bundle, criterion);
    out << "Pure equilibria: ";
    if (equilibria.empty()) out << "none";
    for (std::size_t n = 0; n < equilibria.size(); ++n) {
      out << (n ? " " : "") << "(" << equilibria[n].attack << "," << equilibria[n].defense << ")";
    }
    out << "\n\n";
  }

  for (const auto& selection : options.selections) {
    out << "Selection: " << selection.method;
    if (selection.player) out << " (" << to_string(*selection.player) << ")";
    out << "\n";
    for (const auto& step : selection.trace) out << "  - " << step.text << "\n";
    out << "\n";
  }

  if (!used.empty()) {
    out << "Notes\n";
    for (std::size_t n = 0; n < used.size(); ++n) {
      const auto* a = used[n];
      out << "  [" << n + 1 << "] " << a->matrix << "[" << a->attack << "][" << a->defense
          << "]: reference table prints " << shortest(a->paper_value)
          << "; recomputed from inputs " << shortest(a->reconciled_value) << ". "
          << a->note << "\n";
    }
  }
  return out.str();
}

std::vector<std::filesystem::path> write_report_files(const std::filesystem::path& dir,
                                                      std::string_view scenario_name,
                                                      const MatrixBundle& bundle,
                                                      const ReportOptions& options) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& file, const std::string& text) {
    const auto path = dir / file;
    write_text_file(path, text);
    written.push_back(path);
  };
  for (auto kind : kAllMatrixKinds) {
    emit(std::string(matrix_symbol(kind)) + ".csv",
         matrix_csv(labeled(bundle, kind), options.precision));
  }
  emit("strategy_costs.csv", matrix_csv(strategy_cost_row(bundle), options.precision));
  emit("marks_cost_utility.csv",
       marks_csv(emit_preference_marks(bundle, Criterion::cost_utility)));
  emit("marks_penetration.csv",
       marks_csv(emit_preference_marks(bundle, Criterion::penetration_probability)));
  emit("report.txt", text_report(scenario_name, bundle, options));
  return written;
}

}  // namespace coa
