#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mhlab {

struct Verdict {
  std::string id;
  std::string status;  // pass | fail | inconclusive
  std::string detail;
};

// Collects sections and verdicts into the versioned report document.
// Reports carry no timestamps, so identical runs produce identical bytes.
class ReportBuilder {
 public:
  ReportBuilder(std::uint64_t seed, nlohmann::json config_echo);

  void add_section(const std::string& name, nlohmann::json payload);
  void add_verdict(const std::string& id, const std::string& status,
                   const std::string& detail = "");

  const std::vector<Verdict>& verdicts() const { return verdicts_; }
  // fail beats inconclusive beats pass: 1 / 3 / 0.
  int exit_status() const;
  nlohmann::json finish() const;

 private:
  nlohmann::json doc_;
  std::vector<Verdict> verdicts_;
};

// Write-to-temp-then-rename, so a crash never leaves a partial file.
void write_text_atomic(const std::string& path, const std::string& content);
void write_json_atomic(const std::string& path, const nlohmann::json& doc);
void write_csv_atomic(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

}  // namespace mhlab
