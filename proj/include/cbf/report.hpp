#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace cbf {

enum class CheckStatus { pass, fail, exploratory, error };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::exploratory: return "EXPLORATORY";
    case CheckStatus::error: return "ERROR";
  }
  return "?";
}

struct SampleRecord {
  std::uint64_t seed = 0;
  double margin = 0.0;
  double tolerance = 0.0;
  std::string label;
};

/// Outcome of one verification check.
///
/// Margins are dimensionless: each inequality's slack divided by the sum of
/// the magnitudes of its terms. A record passes when margin >= -tolerance;
/// the report keeps the record closest to (or furthest past) its threshold.
struct CheckReport {
  std::string name;
  long samples = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::uint64_t worst_case_seed = 0;
  double tolerance = 0.0;
  std::string worst_label;
  CheckStatus status = CheckStatus::pass;
  bool exploratory = false;
  std::string message;
  bool keep_details = false;
  std::vector<SampleRecord> details;
  long violations = 0;

  CheckReport() = default;
  CheckReport(std::string n, double tol) : name(std::move(n)), tolerance(tol) {}

  /// Adds one inequality outcome.
  void record(std::uint64_t seed, double margin, double tol, const std::string& label) {
    if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
    if (margin < -tol) ++violations;
    const double severity = margin / (tol > 0.0 ? tol : 1e-300);
    if (!has_worst_ || severity < worst_severity_) {
      has_worst_ = true;
      worst_severity_ = severity;
      worst_margin = margin;
      worst_case_seed = seed;
      tolerance = tol;
      worst_label = label;
    }
    if (keep_details) details.push_back({seed, margin, tol, label});
  }

  void record(std::uint64_t seed, double margin, const std::string& label) { record(seed, margin, tolerance, label); }

  /// Sets the status from the recorded margins unless an error was raised.
  void finalize() {
    if (status == CheckStatus::error) return;
    if (exploratory) {
      status = CheckStatus::exploratory;
    } else {
      status = violations == 0 ? CheckStatus::pass : CheckStatus::fail;
    }
    if (message.empty() && !worst_label.empty()) message = "tightest: " + worst_label;
  }

  void fail_with_error(const std::string& what) {
    status = CheckStatus::error;
    message = what;
  }

  bool passed() const noexcept { return status != CheckStatus::error && worst_margin >= -tolerance; }

  /// True when the check should not make the verify command fail.
  bool acceptable() const noexcept { return status == CheckStatus::pass || status == CheckStatus::exploratory; }

  std::string to_text() const {
    char buf[64];
    std::string out;
    out += "check: " + name + "\n";
    out += "samples: " + std::to_string(samples) + "\n";
    std::snprintf(buf, sizeof buf, "%.6e", worst_margin);
    out += std::string("worst_margin: ") + buf + "\n";
    out += "worst_case_seed: " + std::to_string(worst_case_seed) + "\n";
    std::snprintf(buf, sizeof buf, "%.3e", tolerance);
    out += std::string("tolerance: ") + buf + "\n";
    out += std::string("status: ") + to_string(status) + "\n";
    out += "message: " + message + "\n";
    return out;
  }

 private:
  bool has_worst_ = false;
  double worst_severity_ = 0.0;
};

}  // namespace cbf
