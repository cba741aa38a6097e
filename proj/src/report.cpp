#include <iomanip>
#include <sstream>

#include "solvency/eval.hpp"
#include "text.hpp"

namespace solvency {

namespace {

std::string percent(std::size_t part, std::size_t whole) {
  if (whole == 0) return "-";
  return text::fixed(100.0 * static_cast<double>(part) / static_cast<double>(whole), 1) + "%";
}

}  // namespace

std::string render_report(const EvalReport& report, const std::string& title) {
  constexpr int kLabel = 16;
  constexpr int kCell = 8;
  constexpr int kPct = 16;
  std::ostringstream out;
  if (!title.empty()) out << title << '\n';
  out << std::left << std::setw(kLabel) << "Classification" << std::right;
  for (auto c : kClassAlphabet) out << std::setw(kCell) << class_code(c);
  out << std::setw(kCell) << "Total" << std::setw(kPct) << "Correctly (%)" << '\n';
  const auto& m = report.matrix;
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    out << std::left << std::setw(kLabel) << class_code(class_at(r)) << std::right;
    for (std::size_t c = 0; c < kNumClasses; ++c) out << std::setw(kCell) << m.cells[r][c];
    out << std::setw(kCell) << m.row_total(r) << std::setw(kPct) << percent(m.cells[r][r], m.row_total(r)) << '\n';
  }
  out << std::left << std::setw(kLabel) << "Total" << std::right << std::setw(kCell * kNumClasses) << ""
      << std::setw(kCell) << m.total() << std::setw(kPct) << percent(m.trace(), m.total()) << '\n';
  out << "I = insolvency, W = weak, M = moderate, S = strong\n\n";
  out << "Accuracy: " << text::fixed(report.overall_accuracy, 4) << '\n';
  out << "MAE:      " << text::fixed(report.mae, 4) << '\n';
  out << "RMSE:     " << text::fixed(report.rmse, 4) << '\n';
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string render_summary(const EvalReport& report) {
  std::ostringstream out;
  out << "n=" << report.n << '\n';
  out << "correct=" << report.correct << '\n';
  out << "accuracy=" << text::shortest(report.overall_accuracy) << '\n';
  out << "mae=" << text::shortest(report.mae) << '\n';
  out << "rmse=" << text::shortest(report.rmse) << '\n';
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out << "recall_" << to_string(class_at(c)) << '=' << text::shortest(report.per_class_recall[c]) << '\n';
  }
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    out << "confusion_" << to_string(class_at(r)) << '=';
    for (std::size_t c = 0; c < kNumClasses; ++c) out << (c ? "," : "") << report.matrix.cells[r][c];
    out << '\n';
  }
  out << "warnings=" << report.warnings.size() << '\n';
  return out.str();
}

}  // namespace solvency
